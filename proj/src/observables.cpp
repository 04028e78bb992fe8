#include "biloc/observables.hpp"

#include <cmath>
#include <stdexcept>

#include "biloc/states.hpp"

namespace biloc {

namespace settings {

MeasurementSetting bilocal(int index) {
    if (index != 0 && index != 1) throw std::invalid_argument("bilocal: index must be 0 or 1");
    const double sign = index == 0 ? 1.0 : -1.0;
    return {sign / std::sqrt(3.0), 0.0, std::sqrt(2.0) / std::sqrt(3.0)};
}

MeasurementSetting chsh_alice(int index) {
    if (index != 0 && index != 1) throw std::invalid_argument("chsh_alice: index must be 0 or 1");
    return index == 0 ? MeasurementSetting{0.0, 0.0, 1.0} : MeasurementSetting{1.0, 0.0, 0.0};
}

MeasurementSetting chsh_charlie(int index) {
    if (index != 0 && index != 1) throw std::invalid_argument("chsh_charlie: index must be 0 or 1");
    const double s = 1.0 / std::sqrt(2.0);
    return index == 0 ? MeasurementSetting{s, 0.0, s} : MeasurementSetting{-s, 0.0, s};
}

} // namespace settings

ComplexMatrix setting_operator(const MeasurementSetting& s) {
    const double n2 = s.nx * s.nx + s.ny * s.ny + s.nz * s.nz;
    if (std::abs(n2 - 1.0) > 1e-12) {
        throw std::invalid_argument("setting_operator: Bloch vector is not unit length");
    }
    ComplexMatrix m(2, 2);
    m(0, 0) = s.nz;
    m(0, 1) = cx{s.nx, -s.ny};
    m(1, 0) = cx{s.nx, s.ny};
    m(1, 1) = -s.nz;
    return m;
}

ComplexMatrix projector(const MeasurementSetting& s, int outcome) {
    if (outcome != 0 && outcome != 1) throw std::invalid_argument("projector: outcome must be 0 or 1");
    const double sign = outcome == 0 ? 1.0 : -1.0;
    ComplexMatrix m = setting_operator(s) * cx{sign * 0.5};
    m += ComplexMatrix::identity(2) * cx{0.5};
    return m;
}

std::string to_string(BsmOutcome b) {
    switch (b) {
        case BsmOutcome::PsiPlus00: return "00";
        case BsmOutcome::PsiMinus01: return "01";
        case BsmOutcome::PhiGroup: return "10or11";
    }
    return "?";
}

BsmOutcome bsm_outcome_from_string(const std::string& s) {
    if (s == "00") return BsmOutcome::PsiPlus00;
    if (s == "01") return BsmOutcome::PsiMinus01;
    if (s == "10or11") return BsmOutcome::PhiGroup;
    throw std::invalid_argument("unknown BSM outcome label '" + s + "'");
}

const ComplexMatrix& BsmPovm::element(BsmOutcome b) const {
    switch (b) {
        case BsmOutcome::PsiMinus01: return f1;
        case BsmOutcome::PsiPlus00: return f2;
        case BsmOutcome::PhiGroup: return f3;
    }
    throw std::invalid_argument("BsmPovm::element: unknown outcome");
}

BsmPovm bsm_povm(const BsmNoise& n) {
    if (n.p < 0.0 || n.p > 1.0) throw std::invalid_argument("bsm_povm: p outside [0,1]");
    const ComplexMatrix psim = bell_projector(BellKind::PsiMinus);
    const ComplexMatrix psip = bell_projector(BellKind::PsiPlus);
    const double hi = (1.0 + n.p) / 2.0;
    const double lo = (1.0 - n.p) / 2.0;
    BsmPovm povm{
        hi * psim + lo * psip,
        hi * psip + lo * psim,
        bell_projector(BellKind::PhiPlus) + bell_projector(BellKind::PhiMinus),
    };
    return povm;
}

int bsm_sign(BsmOutcome b, int y) {
    if (y != 0 && y != 1) throw std::invalid_argument("bsm_sign: y must be 0 or 1");
    switch (b) {
        case BsmOutcome::PsiPlus00: return 1;
        case BsmOutcome::PsiMinus01: return y == 0 ? 1 : -1;
        case BsmOutcome::PhiGroup: return y == 0 ? -1 : 0;
    }
    throw std::invalid_argument("bsm_sign: unknown outcome");
}

ComplexMatrix bsm_operator(int y, const BsmNoise& n) {
    if (y != 0 && y != 1) throw std::invalid_argument("bsm_operator: y must be 0 or 1");
    const BsmPovm povm = bsm_povm(n);
    const double a1 = 1.0 - 2.0 * y;
    const double a3 = y - 1.0;
    ComplexMatrix out = povm.f1 * cx{a1};
    out += povm.f2;
    out += povm.f3 * cx{a3};
    return out;
}

} // namespace biloc
