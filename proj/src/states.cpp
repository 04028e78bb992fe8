#include "biloc/states.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace biloc {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

const char* to_string(BellKind kind) {
    switch (kind) {
        case BellKind::PhiPlus: return "Phi+";
        case BellKind::PhiMinus: return "Phi-";
        case BellKind::PsiPlus: return "Psi+";
        case BellKind::PsiMinus: return "Psi-";
    }
    return "?";
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("DensityMatrix: not square");
    if (!m_.is_hermitian(1e-10)) throw std::invalid_argument("DensityMatrix: not Hermitian");
    const cx tr = trace(m_);
    if (std::abs(tr - cx{1.0}) > 1e-10) {
        throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr.real()) +
                                    " deviates from 1");
    }
    const double lo = min_eigenvalue(m_);
    if (lo < -1e-9) {
        throw std::invalid_argument("DensityMatrix: negative eigenvalue " + std::to_string(lo));
    }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
    return DensityMatrix(psi.projector());
}

double DensityMatrix::purity() const {
    return expectation(m_, m_);
}

PureState bell(BellKind kind) {
    switch (kind) {
        case BellKind::PhiPlus: return PureState({kInvSqrt2, 0.0, 0.0, kInvSqrt2});
        case BellKind::PhiMinus: return PureState({kInvSqrt2, 0.0, 0.0, -kInvSqrt2});
        case BellKind::PsiPlus: return PureState({0.0, kInvSqrt2, kInvSqrt2, 0.0});
        case BellKind::PsiMinus: return PureState({0.0, kInvSqrt2, -kInvSqrt2, 0.0});
    }
    throw std::invalid_argument("bell: unknown kind");
}

ComplexMatrix bell_projector(BellKind kind) {
    return bell(kind).projector();
}

DensityMatrix source_state(const SourceNoise& n) {
    if (n.v < 0.0 || n.v > 1.0) throw std::invalid_argument("source_state: v outside [0,1]");
    if (n.lam < 0.0 || n.lam > 1.0) throw std::invalid_argument("source_state: lam outside [0,1]");
    ComplexMatrix rho = n.v * bell_projector(BellKind::PhiPlus);
    const double colored = (1.0 - n.v) * n.lam / 2.0;
    rho += colored * (bell_projector(BellKind::PhiPlus) + bell_projector(BellKind::PhiMinus));
    const double white = (1.0 - n.v) * (1.0 - n.lam) / 4.0;
    rho += white * ComplexMatrix::identity(4);
    return DensityMatrix(std::move(rho));
}

DensityMatrix werner(double visibility) {
    if (visibility < -1.0 / 3.0 || visibility > 1.0) {
        throw std::invalid_argument("werner: visibility outside PSD range [-1/3, 1]");
    }
    ComplexMatrix rho = visibility * bell_projector(BellKind::PhiPlus);
    rho += ((1.0 - visibility) / 4.0) * ComplexMatrix::identity(4);
    return DensityMatrix(std::move(rho));
}

DensityMatrix four_photon_state(const DensityMatrix& rho_ab, const DensityMatrix& rho_bc) {
    if (rho_ab.dim() != 4 || rho_bc.dim() != 4) {
        throw std::invalid_argument("four_photon_state: sources must be 4x4");
    }
    return DensityMatrix(kron(rho_ab.matrix(), rho_bc.matrix()));
}

double fidelity(const PureState& psi, const DensityMatrix& rho) {
    return expectation(psi.projector(), rho.matrix());
}

double SwappedDecomposition::norm_squared() const {
    double s = 0.0;
    for (const auto& row : coeff) {
        for (const auto& v : row) s += std::norm(v);
    }
    return s;
}

SwappedDecomposition bell_decompose_swapped(const PureState& psi_abbc) {
    if (psi_abbc.dim() != 16) {
        throw std::invalid_argument("bell_decompose_swapped: state must be 16-dimensional");
    }
    // Regroup A,B,B',C -> A,C,B,B' so the two swapped pairs are adjacent.
    const PureState regrouped =
        permute_subsystems(psi_abbc, {2, 2, 2, 2}, {0, 3, 1, 2});

    SwappedDecomposition out{};
    for (std::size_t j = 0; j < 4; ++j) {
        const PureState bj = bell(kAllBellKinds[j]);
        for (std::size_t k = 0; k < 4; ++k) {
            const PureState basis = kron(bj, bell(kAllBellKinds[k]));
            out.coeff[j][k] = basis.inner(regrouped);
        }
    }
    return out;
}

} // namespace biloc
