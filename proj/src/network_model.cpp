#include "biloc/network_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace biloc {

NetworkConfig NetworkConfig::bilocality(SourceNoise s1, SourceNoise s2, BsmNoise bsm) {
    NetworkConfig cfg;
    cfg.source1 = s1;
    cfg.source2 = s2;
    cfg.bsm = bsm;
    cfg.settings_a = {settings::bilocal(0), settings::bilocal(1)};
    cfg.settings_c = {settings::bilocal(0), settings::bilocal(1)};
    cfg.mode = TestMode::Bilocality;
    return cfg;
}

NetworkConfig NetworkConfig::chsh(SourceNoise s1, SourceNoise s2, BsmNoise bsm) {
    NetworkConfig cfg;
    cfg.source1 = s1;
    cfg.source2 = s2;
    cfg.bsm = bsm;
    cfg.settings_a = {settings::chsh_alice(0), settings::chsh_alice(1)};
    cfg.settings_c = {settings::chsh_charlie(0), settings::chsh_charlie(1)};
    cfg.mode = TestMode::Chsh;
    return cfg;
}

NetworkConfig NetworkConfig::from_swapped_visibility(double v_swapped, double lam, double p,
                                                     TestMode mode) {
    if (v_swapped < 0.0 || v_swapped > 1.0) {
        throw std::invalid_argument("swapped visibility outside [0,1]");
    }
    const SourceNoise per_source{std::sqrt(v_swapped), lam};
    return mode == TestMode::Bilocality ? bilocality(per_source, per_source, BsmNoise{p})
                                        : chsh(per_source, per_source, BsmNoise{p});
}

ProbabilityTable::ProbabilityTable() {
    p_.fill(0.0);
    sigma_.fill(0.0);
    present_.fill(false);
}

std::size_t ProbabilityTable::index(int x, int z, BsmOutcome b, int a, int c) {
    if (x < 0 || x > 1 || z < 0 || z > 1 || a < 0 || a > 1 || c < 0 || c > 1) {
        throw std::out_of_range("ProbabilityTable: x,z,a,c must be bits");
    }
    const auto bi = static_cast<std::size_t>(b);
    return (((static_cast<std::size_t>(x) * 2 + z) * 3 + bi) * 2 + a) * 2 + c;
}

void ProbabilityTable::set(int x, int z, BsmOutcome b, int a, int c, double p,
                           std::optional<double> sigma) {
    const std::size_t i = index(x, z, b, a, c);
    p_[i] = p;
    sigma_[i] = sigma.value_or(0.0);
    present_[i] = true;
}

double ProbabilityTable::at(int x, int z, BsmOutcome b, int a, int c) const {
    const std::size_t i = index(x, z, b, a, c);
    if (!present_[i]) throw std::out_of_range("ProbabilityTable: missing entry");
    return p_[i];
}

double ProbabilityTable::sigma_at(int x, int z, BsmOutcome b, int a, int c) const {
    const std::size_t i = index(x, z, b, a, c);
    if (!present_[i]) throw std::out_of_range("ProbabilityTable: missing entry");
    return sigma_[i];
}

bool ProbabilityTable::has(int x, int z, BsmOutcome b, int a, int c) const {
    return present_[index(x, z, b, a, c)];
}

bool ProbabilityTable::block_complete(int x, int z) const {
    for (BsmOutcome b : kAllBsmOutcomes) {
        for (int a = 0; a < 2; ++a) {
            for (int c = 0; c < 2; ++c) {
                if (!present_[index(x, z, b, a, c)]) return false;
            }
        }
    }
    return true;
}

bool ProbabilityTable::complete() const {
    for (int x = 0; x < 2; ++x) {
        for (int z = 0; z < 2; ++z) {
            if (!block_complete(x, z)) return false;
        }
    }
    return true;
}

bool ProbabilityTable::has_sigmas() const {
    for (std::size_t i = 0; i < sigma_.size(); ++i) {
        if (present_[i] && sigma_[i] > 0.0) return true;
    }
    return false;
}

double ProbabilityTable::block_sum(int x, int z) const {
    double s = 0.0;
    for (BsmOutcome b : kAllBsmOutcomes) {
        for (int a = 0; a < 2; ++a) {
            for (int c = 0; c < 2; ++c) s += at(x, z, b, a, c);
        }
    }
    return s;
}

void ProbabilityTable::validate(double tol) const {
    for (int x = 0; x < 2; ++x) {
        for (int z = 0; z < 2; ++z) {
            if (!block_complete(x, z)) {
                throw std::invalid_argument("table block x=" + std::to_string(x) +
                                            " z=" + std::to_string(z) + " is incomplete");
            }
            for (BsmOutcome b : kAllBsmOutcomes) {
                for (int a = 0; a < 2; ++a) {
                    for (int c = 0; c < 2; ++c) {
                        if (at(x, z, b, a, c) < 0.0) {
                            throw std::invalid_argument("table holds a negative probability");
                        }
                    }
                }
            }
            const double s = block_sum(x, z);
            if (std::abs(s - 1.0) > tol) {
                throw std::invalid_argument("table block x=" + std::to_string(x) +
                                            " z=" + std::to_string(z) + " sums to " +
                                            std::to_string(s) + ", outside tolerance");
            }
        }
    }
}

ProbabilityTable ProbabilityTable::from_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    const nlohmann::json* records = &doc;
    if (doc.is_object()) {
        if (!doc.contains("records")) {
            throw std::invalid_argument("probability table JSON: expected an array of records");
        }
        records = &doc.at("records");
    }
    if (!records->is_array()) {
        throw std::invalid_argument("probability table JSON: expected an array of records");
    }
    ProbabilityTable t;
    for (const auto& rec : *records) {
        const int x = rec.at("x").get<int>();
        const int z = rec.at("z").get<int>();
        const BsmOutcome b = bsm_outcome_from_string(rec.at("b").get<std::string>());
        const int a = rec.at("a").get<int>();
        const int c = rec.at("c").get<int>();
        const double p = rec.at("p").get<double>();
        std::optional<double> sigma;
        if (rec.contains("sigma")) sigma = rec.at("sigma").get<double>();
        t.set(x, z, b, a, c, p, sigma);
    }
    return t;
}

ProbabilityTable ProbabilityTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open table file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::string ProbabilityTable::to_json() const {
    nlohmann::json records = nlohmann::json::array();
    const bool sigmas = has_sigmas();
    for (int x = 0; x < 2; ++x) {
        for (int z = 0; z < 2; ++z) {
            for (BsmOutcome b : kAllBsmOutcomes) {
                for (int a = 0; a < 2; ++a) {
                    for (int c = 0; c < 2; ++c) {
                        if (!has(x, z, b, a, c)) continue;
                        nlohmann::json rec{{"x", x},       {"z", z}, {"b", to_string(b)},
                                           {"a", a},       {"c", c}, {"p", at(x, z, b, a, c)}};
                        if (sigmas) rec["sigma"] = sigma_at(x, z, b, a, c);
                        records.push_back(std::move(rec));
                    }
                }
            }
        }
    }
    return records.dump(1);
}

double joint_probability(const NetworkConfig& cfg, int x, int z, BsmOutcome b, int a, int c) {
    const DensityMatrix rho = four_photon_state(source_state(cfg.source1),
                                                source_state(cfg.source2));
    const BsmPovm povm = bsm_povm(cfg.bsm);
    const ComplexMatrix op =
        kron(kron(projector(cfg.settings_a.at(x), a), povm.element(b)),
             projector(cfg.settings_c.at(z), c));
    const double p = expectation(op, rho.matrix());
    if (p < -1e-10) {
        throw std::logic_error("joint_probability: negative probability " + std::to_string(p));
    }
    return p < 0.0 ? 0.0 : p;
}

ProbabilityTable model_probability_table(const NetworkConfig& cfg) {
    const DensityMatrix rho = four_photon_state(source_state(cfg.source1),
                                                source_state(cfg.source2));
    const BsmPovm povm = bsm_povm(cfg.bsm);
    ProbabilityTable t;
    for (int x = 0; x < 2; ++x) {
        for (int z = 0; z < 2; ++z) {
            for (BsmOutcome b : kAllBsmOutcomes) {
                for (int a = 0; a < 2; ++a) {
                    for (int c = 0; c < 2; ++c) {
                        const ComplexMatrix op =
                            kron(kron(projector(cfg.settings_a.at(x), a), povm.element(b)),
                                 projector(cfg.settings_c.at(z), c));
                        double p = expectation(op, rho.matrix());
                        if (p < -1e-10) {
                            throw std::logic_error("model_probability_table: negative probability");
                        }
                        t.set(x, z, b, a, c, p < 0.0 ? 0.0 : p);
                    }
                }
            }
        }
    }
    return t;
}

double correlator(const NetworkConfig& cfg, int x, int y, int z) {
    const DensityMatrix rho = four_photon_state(source_state(cfg.source1),
                                                source_state(cfg.source2));
    const ComplexMatrix op =
        kron(kron(setting_operator(cfg.settings_a.at(x)), bsm_operator(y, cfg.bsm)),
             setting_operator(cfg.settings_c.at(z)));
    return expectation(op, rho.matrix());
}

double correlator_from_table(const ProbabilityTable& t, int x, int y, int z) {
    if (!t.block_complete(x, z)) {
        throw std::invalid_argument("correlator_from_table: block x=" + std::to_string(x) +
                                    " z=" + std::to_string(z) + " is incomplete");
    }
    double s = 0.0;
    for (BsmOutcome b : kAllBsmOutcomes) {
        const int bs = bsm_sign(b, y);
        if (bs == 0) continue;
        for (int a = 0; a < 2; ++a) {
            for (int c = 0; c < 2; ++c) {
                const int sign = ((a + c) % 2 == 0 ? 1 : -1) * bs;
                s += sign * t.at(x, z, b, a, c);
            }
        }
    }
    return s;
}

double bilocal_I(const std::array<double, 4>& corr_y0) {
    return 0.25 * (corr_y0[0] + corr_y0[1] + corr_y0[2] + corr_y0[3]);
}

double bilocal_J(const std::array<double, 4>& corr_y1) {
    // (x,z) order (0,0),(0,1),(1,0),(1,1); weight (-1)^(x+z)
    return 0.25 * (corr_y1[0] - corr_y1[1] - corr_y1[2] + corr_y1[3]);
}

double b13(double I, double J) {
    return std::sqrt(std::abs(I)) + std::sqrt(std::abs(J));
}

namespace {

template <typename CorrFn>
B13Result b13_from_correlators(CorrFn&& corr) {
    std::array<double, 4> c0{}, c1{};
    std::size_t i = 0;
    for (int x = 0; x < 2; ++x) {
        for (int z = 0; z < 2; ++z, ++i) {
            c0[i] = corr(x, 0, z);
            c1[i] = corr(x, 1, z);
        }
    }
    B13Result r;
    r.I = bilocal_I(c0);
    r.J = bilocal_J(c1);
    r.value = b13(r.I, r.J);
    return r;
}

} // namespace

B13Result b13_from_table(const ProbabilityTable& t) {
    return b13_from_correlators(
        [&](int x, int y, int z) { return correlator_from_table(t, x, y, z); });
}

B13Result b13_from_model(const NetworkConfig& cfg) {
    const DensityMatrix rho = four_photon_state(source_state(cfg.source1),
                                                source_state(cfg.source2));
    const std::array<ComplexMatrix, 2> by = {bsm_operator(0, cfg.bsm), bsm_operator(1, cfg.bsm)};
    return b13_from_correlators([&](int x, int y, int z) {
        const ComplexMatrix op =
            kron(kron(setting_operator(cfg.settings_a.at(x)), by.at(y)),
                 setting_operator(cfg.settings_c.at(z)));
        return expectation(op, rho.matrix());
    });
}

double b13_closed_form(double p, double vA, double lamA, double vC, double lamC) {
    const double bracket_a = vA * (1.0 - lamA) + lamA;
    const double bracket_c = vC * (1.0 - lamC) + lamC;
    return std::sqrt(std::abs(2.0 * bracket_a * bracket_c)) / std::sqrt(3.0) +
           std::sqrt(p * vA * vC) / std::sqrt(6.0);
}

double chsh_closed_form(double p, double vA, double lamA, double vC, double lamC) {
    const double bracket_a = vA * (1.0 - lamA) + lamA;
    const double bracket_c = vC * (1.0 - lamC) + lamC;
    return std::sqrt(2.0) * (p * vA * vC + std::abs(bracket_a * bracket_c));
}

namespace {

template <typename ProbFn>
double chsh_from_conditionals(ProbFn&& prob) {
    double corr[2][2];
    for (int x = 0; x < 2; ++x) {
        for (int z = 0; z < 2; ++z) {
            double num = 0.0, den = 0.0;
            for (int a = 0; a < 2; ++a) {
                for (int c = 0; c < 2; ++c) {
                    const double p = prob(x, z, a, c);
                    num += ((a + c) % 2 == 0 ? p : -p);
                    den += p;
                }
            }
            if (den <= 0.0) {
                throw std::domain_error("CHSH: zero Psi- success probability for x=" +
                                        std::to_string(x) + " z=" + std::to_string(z));
            }
            corr[x][z] = num / den;
        }
    }
    return std::abs(corr[0][0] + corr[0][1] + corr[1][0] - corr[1][1]);
}

} // namespace

double chsh_from_model(const NetworkConfig& cfg) {
    return chsh_from_states(source_state(cfg.source1), source_state(cfg.source2),
                            cfg.settings_a, cfg.settings_c, cfg.bsm);
}

double chsh_from_states(const DensityMatrix& rho_ab, const DensityMatrix& rho_bc,
                        const std::array<MeasurementSetting, 2>& settings_a,
                        const std::array<MeasurementSetting, 2>& settings_c, BsmNoise bsm) {
    const DensityMatrix rho = four_photon_state(rho_ab, rho_bc);
    const BsmPovm povm = bsm_povm(bsm);
    return chsh_from_conditionals([&](int x, int z, int a, int c) {
        const ComplexMatrix op = kron(kron(projector(settings_a.at(x), a), povm.f1),
                                      projector(settings_c.at(z), c));
        return expectation(op, rho.matrix());
    });
}

double chsh_from_table(const ProbabilityTable& t) {
    return chsh_from_conditionals([&](int x, int z, int a, int c) {
        return t.at(x, z, BsmOutcome::PsiMinus01, a, c);
    });
}

std::vector<SweepPoint> noise_sweep(const std::vector<double>& p_grid, double v_swapped,
                                    double lam_low, double lam_high) {
    const double v = std::sqrt(v_swapped);
    std::vector<SweepPoint> out;
    out.reserve(p_grid.size());
    for (double p : p_grid) {
        SweepPoint pt;
        pt.p = p;
        pt.b13_low = b13_closed_form(p, v, lam_low, v, lam_low);
        pt.b13_high = b13_closed_form(p, v, lam_high, v, lam_high);
        pt.s_low = chsh_closed_form(p, v, lam_low, v, lam_low);
        pt.s_high = chsh_closed_form(p, v, lam_high, v, lam_high);
        out.push_back(pt);
    }
    return out;
}

double threshold_visibility(Criterion which) {
    const auto excess = [&](double v_swapped) {
        const double per_source = std::sqrt(v_swapped);
        if (which == Criterion::B13) {
            return b13_closed_form(1.0, per_source, 0.0, per_source, 0.0) - 1.0;
        }
        return chsh_closed_form(1.0, per_source, 0.0, per_source, 0.0) - 2.0;
    };
    double lo = 0.01, hi = 1.0;
    if (excess(lo) > 0.0 || excess(hi) < 0.0) {
        throw std::logic_error("threshold_visibility: bracket does not straddle the bound");
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double deterministic_strategy_max(Criterion objective) {
    double best = 0.0;
    for (int a0 = 0; a0 < 2; ++a0) {
        for (int a1 = 0; a1 < 2; ++a1) {
            for (int c0 = 0; c0 < 2; ++c0) {
                for (int c1 = 0; c1 < 2; ++c1) {
                    const int a[2] = {a0, a1};
                    const int c[2] = {c0, c1};
                    for (int b0 = 0; b0 < 2; ++b0) {
                        for (int b1 = 0; b1 < 2; ++b1) {
                            const int b[2] = {b0, b1};
                            const auto corr = [&](int x, int y, int z) {
                                return ((a[x] + b[y] + c[z]) % 2 == 0) ? 1.0 : -1.0;
                            };
                            double value;
                            if (objective == Criterion::B13) {
                                std::array<double, 4> cy0{}, cy1{};
                                std::size_t i = 0;
                                for (int x = 0; x < 2; ++x) {
                                    for (int z = 0; z < 2; ++z, ++i) {
                                        cy0[i] = corr(x, 0, z);
                                        cy1[i] = corr(x, 1, z);
                                    }
                                }
                                value = b13(bilocal_I(cy0), bilocal_J(cy1));
                            } else {
                                const auto ac = [&](int x, int z) {
                                    return ((a[x] + c[z]) % 2 == 0) ? 1.0 : -1.0;
                                };
                                value = std::abs(ac(0, 0) + ac(0, 1) + ac(1, 0) - ac(1, 1));
                            }
                            best = std::max(best, value);
                        }
                    }
                }
            }
        }
    }
    return best;
}

} // namespace biloc
