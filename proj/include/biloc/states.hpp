// Bell states, the noisy two-photon source states, and the four-photon
// product state shared by the two sources. Qubit basis convention:
// |0> = |H>, |1> = |V>. Global subsystem order is A, B, B', C with
// Bob's pair in the middle.

#pragma once

#include <array>

#include "biloc/linalg.hpp"

namespace biloc {

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline constexpr std::array<BellKind, 4> kAllBellKinds = {
    BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus};

const char* to_string(BellKind kind);

// Total noise weight v and coloured fraction lam, both in [0,1].
// v = 1 is the clean |Phi+> source; at v = 0 the state is an equal-weight
// Phi+/Phi- mixture for lam = 1 and maximally mixed for lam = 0.
struct SourceNoise {
    double v = 1.0;
    double lam = 0.0;
};

// Hermitian, unit-trace, positive semidefinite matrix. Construction
// validates all three (Hermiticity and trace to 1e-10, eigenvalues down
// to -1e-9).
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m);
    static DensityMatrix from_pure(const PureState& psi);

    std::size_t dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }
    const cx& operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

    double purity() const;

private:
    ComplexMatrix m_;
};

// The four Bell states as 4-amplitude vectors; Phi+/- on the diagonal
// entries, Psi+/- on the antidiagonal, standard sign convention.
PureState bell(BellKind kind);
ComplexMatrix bell_projector(BellKind kind);

// rho = v |Phi+><Phi+| + (1-v) [ lam/2 (|Phi+><Phi+| + |Phi-><Phi-|)
//                              + (1-lam)/4 I ]
DensityMatrix source_state(const SourceNoise& n);

// Werner state V |Phi+><Phi+| + (1-V)/4 I. Accepts the full PSD range
// V in [-1/3, 1].
DensityMatrix werner(double visibility);

// rho_AB (x) rho_B'C, a 16x16 state in subsystem order A, B, B', C.
DensityMatrix four_photon_state(const DensityMatrix& rho_ab, const DensityMatrix& rho_bc);

// <psi| rho |psi>
double fidelity(const PureState& psi, const DensityMatrix& rho);

// Amplitudes of a normalized 4-photon pure state (order A, B, B', C) in
// the regrouped Bell(x)Bell basis of AC and BB'. coeff[j][k] multiplies
// |bell_j>_AC (x) |bell_k>_BB' with j, k indexing kAllBellKinds.
struct SwappedDecomposition {
    std::array<std::array<cx, 4>, 4> coeff;

    const cx& operator()(BellKind ac, BellKind bb) const {
        return coeff[static_cast<std::size_t>(ac)][static_cast<std::size_t>(bb)];
    }
    double norm_squared() const;
};

SwappedDecomposition bell_decompose_swapped(const PureState& psi_abbc);

} // namespace biloc
