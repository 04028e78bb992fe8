// Measurement settings for Alice/Charlie (unit-Bloch-vector observables),
// their outcome projectors, and Bob's three-outcome Bell-state-measurement
// POVM with partial Psi+/Psi- distinguishability p.

#pragma once

#include <array>
#include <string>

#include "biloc/linalg.hpp"

namespace biloc {

// A +-1-valued observable n.sigma with |n| = 1 (checked to 1e-12 when the
// operator is built).
struct MeasurementSetting {
    double nx = 0.0;
    double ny = 0.0;
    double nz = 1.0;
};

namespace settings {

// Bilocality-test settings: A0 = C0 = (sqrt2 sz + sx)/sqrt3 and
// A1 = C1 = (sqrt2 sz - sx)/sqrt3.
MeasurementSetting bilocal(int index);

// CHSH-after-swapping settings: A0 = sz, A1 = sx,
// C0 = (sz + sx)/sqrt2, C1 = (sz - sx)/sqrt2.
MeasurementSetting chsh_alice(int index);
MeasurementSetting chsh_charlie(int index);

} // namespace settings

ComplexMatrix setting_operator(const MeasurementSetting& s);

// (I + (-1)^outcome n.sigma)/2; outcome 0 is the +1 eigenvalue.
ComplexMatrix projector(const MeasurementSetting& s, int outcome);

// Bob's output groups: b = 00 (Psi+ dominant), b = 01 (Psi- dominant) and
// the merged {10 or 11} Phi group.
enum class BsmOutcome { PsiPlus00, PsiMinus01, PhiGroup };

inline constexpr std::array<BsmOutcome, 3> kAllBsmOutcomes = {
    BsmOutcome::PsiPlus00, BsmOutcome::PsiMinus01, BsmOutcome::PhiGroup};

std::string to_string(BsmOutcome b);
BsmOutcome bsm_outcome_from_string(const std::string& s);

// Interference noise parameter p in [0,1]; p = 1 is a perfect BSM, p = 0
// mixes Psi+ and Psi- completely.
struct BsmNoise {
    double p = 1.0;
};

struct BsmPovm {
    ComplexMatrix f1;  // Psi- dominant element
    ComplexMatrix f2;  // Psi+ dominant element
    ComplexMatrix f3;  // Phi+ plus Phi- group

    const ComplexMatrix& element(BsmOutcome b) const;
};

// F1 = (1+p)/2 |Psi-><Psi-| + (1-p)/2 |Psi+><Psi+|
// F2 = (1+p)/2 |Psi+><Psi+| + (1-p)/2 |Psi-><Psi-|
// F3 = |Phi+><Phi+| + |Phi-><Phi-|
BsmPovm bsm_povm(const BsmNoise& n);

// Sign carried by outcome b in the y-indexed correlator: +1 for b=00,
// (-1)^y for b=01, and -1 (y=0) or 0 (y=1) for the Phi group.
int bsm_sign(BsmOutcome b, int y);

// B^y = a1 F1 + a2 F2 + a3 F3 with a1 = 1-2y, a2 = 1, a3 = y-1.
ComplexMatrix bsm_operator(int y, const BsmNoise& n);

} // namespace biloc
