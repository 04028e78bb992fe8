#include "biloc/statistics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "biloc/rng.hpp"

namespace biloc {

CountsTable::CountsTable() {
    counts_.fill(0);
    trials_.fill(0);
}

std::size_t CountsTable::index(int x, int z, BsmOutcome b, int a, int c) {
    if (x < 0 || x > 1 || z < 0 || z > 1 || a < 0 || a > 1 || c < 0 || c > 1) {
        throw std::out_of_range("CountsTable: x,z,a,c must be bits");
    }
    const auto bi = static_cast<std::size_t>(b);
    return (((static_cast<std::size_t>(x) * 2 + z) * 3 + bi) * 2 + a) * 2 + c;
}

void CountsTable::set_trials(int x, int z, std::uint64_t n) {
    trials_[static_cast<std::size_t>(x) * 2 + z] = n;
}

std::uint64_t CountsTable::trials(int x, int z) const {
    return trials_[static_cast<std::size_t>(x) * 2 + z];
}

void CountsTable::add(int x, int z, BsmOutcome b, int a, int c, std::uint64_t n) {
    counts_[index(x, z, b, a, c)] += n;
}

std::uint64_t CountsTable::count(int x, int z, BsmOutcome b, int a, int c) const {
    return counts_[index(x, z, b, a, c)];
}

std::uint64_t CountsTable::block_total(int x, int z) const {
    std::uint64_t s = 0;
    for (BsmOutcome b : kAllBsmOutcomes) {
        for (int a = 0; a < 2; ++a) {
            for (int c = 0; c < 2; ++c) s += count(x, z, b, a, c);
        }
    }
    return s;
}

CountsTable CountsTable::from_json(const std::string& text) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    CountsTable t;
    const auto& trials = doc.at("trials");
    for (auto it = trials.begin(); it != trials.end(); ++it) {
        const std::string& key = it.key();
        if (key.size() != 3 || key[1] != ',') {
            throw std::invalid_argument("counts JSON: trials key '" + key + "' is not \"x,z\"");
        }
        const int x = key[0] - '0';
        const int z = key[2] - '0';
        if (x < 0 || x > 1 || z < 0 || z > 1) {
            throw std::invalid_argument("counts JSON: trials key '" + key + "' out of range");
        }
        t.set_trials(x, z, it.value().get<std::uint64_t>());
    }
    for (const auto& rec : doc.at("counts")) {
        t.add(rec.at("x").get<int>(), rec.at("z").get<int>(),
              bsm_outcome_from_string(rec.at("b").get<std::string>()), rec.at("a").get<int>(),
              rec.at("c").get<int>(), rec.at("n").get<std::uint64_t>());
    }
    for (int x = 0; x < 2; ++x) {
        for (int z = 0; z < 2; ++z) {
            if (t.block_total(x, z) > t.trials(x, z)) {
                throw std::invalid_argument("counts JSON: block counts exceed trials");
            }
        }
    }
    return t;
}

CountsTable CountsTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open counts file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::string CountsTable::to_json() const {
    nlohmann::json trials = nlohmann::json::object();
    for (int x = 0; x < 2; ++x) {
        for (int z = 0; z < 2; ++z) {
            trials[std::to_string(x) + "," + std::to_string(z)] = this->trials(x, z);
        }
    }
    nlohmann::json counts = nlohmann::json::array();
    for (int x = 0; x < 2; ++x) {
        for (int z = 0; z < 2; ++z) {
            for (BsmOutcome b : kAllBsmOutcomes) {
                for (int a = 0; a < 2; ++a) {
                    for (int c = 0; c < 2; ++c) {
                        counts.push_back(nlohmann::json{{"x", x},
                                                        {"z", z},
                                                        {"b", to_string(b)},
                                                        {"a", a},
                                                        {"c", c},
                                                        {"n", count(x, z, b, a, c)}});
                    }
                }
            }
        }
    }
    return nlohmann::json{{"trials", trials}, {"counts", counts}}.dump(1);
}

namespace {

constexpr std::uint64_t kChunkTrials = 65536;

struct OutcomeCdf {
    // cumulative probability over the 12 outcomes, b-major then a then c
    std::array<double, 12> cumulative{};
};

OutcomeCdf block_cdf(const ProbabilityTable& t, int x, int z) {
    OutcomeCdf cdf;
    double acc = 0.0;
    std::size_t i = 0;
    for (BsmOutcome b : kAllBsmOutcomes) {
        for (int a = 0; a < 2; ++a) {
            for (int c = 0; c < 2; ++c, ++i) {
                acc += t.at(x, z, b, a, c);
                cdf.cumulative[i] = acc;
            }
        }
    }
    return cdf;
}

std::size_t draw_outcome(const OutcomeCdf& cdf, double u) {
    const double scaled = u * cdf.cumulative.back();
    for (std::size_t i = 0; i < cdf.cumulative.size(); ++i) {
        if (scaled < cdf.cumulative[i]) return i;
    }
    return cdf.cumulative.size() - 1;
}

} // namespace

CountsTable sample_counts(const NetworkConfig& cfg, std::uint64_t n_trials_per_setting,
                          std::uint64_t seed, unsigned n_workers) {
    if (n_trials_per_setting < 1) {
        throw std::invalid_argument("sample_counts: need at least one trial per setting");
    }
    const ProbabilityTable model = model_probability_table(cfg);

    struct Task {
        int x, z;
        std::uint64_t chunk_index;
        std::uint64_t trials;
    };
    std::vector<Task> tasks;
    for (int x = 0; x < 2; ++x) {
        for (int z = 0; z < 2; ++z) {
            std::uint64_t remaining = n_trials_per_setting;
            std::uint64_t chunk = 0;
            while (remaining > 0) {
                const std::uint64_t n = std::min(remaining, kChunkTrials);
                tasks.push_back({x, z, chunk, n});
                remaining -= n;
                ++chunk;
            }
        }
    }

    std::array<OutcomeCdf, 4> cdfs;
    for (int x = 0; x < 2; ++x) {
        for (int z = 0; z < 2; ++z) cdfs[static_cast<std::size_t>(x) * 2 + z] = block_cdf(model, x, z);
    }

    if (n_workers == 0) n_workers = std::max(1u, std::thread::hardware_concurrency());
    n_workers = std::min<unsigned>(n_workers, tasks.size() == 0 ? 1 : static_cast<unsigned>(tasks.size()));

    std::atomic<std::size_t> next_task{0};
    std::vector<std::array<std::uint64_t, 48>> partials(n_workers);
    for (auto& p : partials) p.fill(0);

    const auto worker = [&](unsigned w) {
        auto& local = partials[w];
        for (;;) {
            const std::size_t ti = next_task.fetch_add(1);
            if (ti >= tasks.size()) break;
            const Task& task = tasks[ti];
            const std::uint64_t block = static_cast<std::uint64_t>(task.x) * 2 + task.z;
            std::mt19937_64 gen = derive_stream(seed, block, task.chunk_index);
            const OutcomeCdf& cdf = cdfs[block];
            for (std::uint64_t i = 0; i < task.trials; ++i) {
                const std::size_t outcome = draw_outcome(cdf, uniform01(gen));
                local[block * 12 + outcome] += 1;
            }
        }
    };

    if (n_workers == 1) {
        worker(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) threads.emplace_back(worker, w);
        for (auto& th : threads) th.join();
    }

    CountsTable out;
    for (int x = 0; x < 2; ++x) {
        for (int z = 0; z < 2; ++z) {
            out.set_trials(x, z, n_trials_per_setting);
            const std::size_t block = static_cast<std::size_t>(x) * 2 + z;
            std::size_t i = 0;
            for (BsmOutcome b : kAllBsmOutcomes) {
                for (int a = 0; a < 2; ++a) {
                    for (int c = 0; c < 2; ++c, ++i) {
                        std::uint64_t n = 0;
                        for (const auto& p : partials) n += p[block * 12 + i];
                        out.add(x, z, b, a, c, n);
                    }
                }
            }
        }
    }
    return out;
}

ProbabilityTable counts_to_table(const CountsTable& counts) {
    ProbabilityTable t;
    for (int x = 0; x < 2; ++x) {
        for (int z = 0; z < 2; ++z) {
            const std::uint64_t total = counts.trials(x, z);
            if (total == 0) {
                throw std::invalid_argument("counts_to_table: empty block x=" + std::to_string(x) +
                                            " z=" + std::to_string(z));
            }
            for (BsmOutcome b : kAllBsmOutcomes) {
                for (int a = 0; a < 2; ++a) {
                    for (int c = 0; c < 2; ++c) {
                        const std::uint64_t n = counts.count(x, z, b, a, c);
                        const double p = static_cast<double>(n) / static_cast<double>(total);
                        const double sigma =
                            n == 0 ? 1.0 / static_cast<double>(total)
                                   : std::sqrt(static_cast<double>(n)) / static_cast<double>(total);
                        t.set(x, z, b, a, c, p, sigma);
                    }
                }
            }
        }
    }
    return t;
}

namespace {

template <typename Statistic>
EstimateWithError bootstrap_estimate(const ProbabilityTable& t, int n_boot, std::uint64_t seed,
                                     Statistic&& statistic) {
    if (n_boot < 100) throw std::invalid_argument("bootstrap: n_boot must be at least 100");
    EstimateWithError est;
    est.value = statistic(t);

    std::vector<double> values;
    values.reserve(n_boot);
    for (int r = 0; r < n_boot; ++r) {
        std::mt19937_64 gen = derive_stream(seed, 0xb00f, static_cast<std::uint64_t>(r));
        ProbabilityTable resampled;
        for (int x = 0; x < 2; ++x) {
            for (int z = 0; z < 2; ++z) {
                std::array<double, 12> perturbed{};
                double sum = 0.0;
                std::size_t i = 0;
                for (BsmOutcome b : kAllBsmOutcomes) {
                    for (int a = 0; a < 2; ++a) {
                        for (int c = 0; c < 2; ++c, ++i) {
                            const double p = t.at(x, z, b, a, c);
                            const double s = t.sigma_at(x, z, b, a, c);
                            const double q = std::max(0.0, p + s * gaussian(gen));
                            perturbed[i] = q;
                            sum += q;
                        }
                    }
                }
                i = 0;
                for (BsmOutcome b : kAllBsmOutcomes) {
                    for (int a = 0; a < 2; ++a) {
                        for (int c = 0; c < 2; ++c, ++i) {
                            resampled.set(x, z, b, a, c, sum > 0.0 ? perturbed[i] / sum : 0.0);
                        }
                    }
                }
            }
        }
        values.push_back(statistic(resampled));
    }

    bool any_spread = false;
    for (double v : values) any_spread = any_spread || v != values.front();
    if (!any_spread) {
        est.sigma = 0.0;  // zero sigmas resample to the identical table
        return est;
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= values.size();
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    est.sigma = values.size() > 1 ? std::sqrt(var / (values.size() - 1)) : 0.0;
    return est;
}

} // namespace

EstimateWithError b13_with_error(const ProbabilityTable& t, int n_boot, std::uint64_t seed) {
    return bootstrap_estimate(t, n_boot, seed,
                              [](const ProbabilityTable& tab) { return b13_from_table(tab).value; });
}

EstimateWithError chsh_with_error(const ProbabilityTable& t, int n_boot, std::uint64_t seed) {
    return bootstrap_estimate(t, n_boot, seed,
                              [](const ProbabilityTable& tab) { return chsh_from_table(tab); });
}

double visibility_estimate(std::uint64_t c_max, std::uint64_t c_min) {
    if (c_max + c_min == 0) throw std::invalid_argument("visibility_estimate: no counts");
    return (static_cast<double>(c_max) - static_cast<double>(c_min)) /
           (static_cast<double>(c_max) + static_cast<double>(c_min));
}

double noise_parameter(double c_delay, double c_dist) {
    if (c_dist <= 0.0) throw std::invalid_argument("noise_parameter: C_D must be positive");
    return (c_dist - c_delay) / c_dist;
}

double qrng_basis_fidelity(std::uint64_t c_right, std::uint64_t c_wrong) {
    if (c_right + c_wrong == 0) throw std::invalid_argument("qrng_basis_fidelity: no counts");
    return static_cast<double>(c_right) /
           (static_cast<double>(c_right) + static_cast<double>(c_wrong));
}

double fidelity_to_visibility(double fidelity) {
    if (fidelity < 0.25 || fidelity > 1.0) {
        throw std::invalid_argument("fidelity_to_visibility: F outside [0.25, 1]");
    }
    return (4.0 * fidelity - 1.0) / 3.0;
}

double hom_visibility_bound(double mu, bool discard_multi_clicks) {
    if (mu < 0.0) throw std::invalid_argument("hom_visibility_bound: mu must be nonnegative");
    return discard_multi_clicks ? (1.0 + 4.0 * mu) / (1.0 + 6.0 * mu)
                                : (1.0 + 8.0 * mu) / (1.0 + 12.0 * mu);
}

std::vector<HomDipPoint> parse_hom_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("HOM CSV: empty file");
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line != "delay_ps,coincidences") {
        throw std::invalid_argument("HOM CSV: expected header 'delay_ps,coincidences'");
    }
    std::vector<HomDipPoint> points;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.size() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("HOM CSV: line " + std::to_string(lineno) + " has no comma");
        }
        try {
            HomDipPoint p;
            p.delay_ps = std::stod(line.substr(0, comma));
            p.coincidences = std::stod(line.substr(comma + 1));
            points.push_back(p);
        } catch (const std::exception&) {
            throw std::invalid_argument("HOM CSV: line " + std::to_string(lineno) +
                                        " is not numeric");
        }
    }
    return points;
}

std::vector<HomDipPoint> load_hom_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open HOM data file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_hom_csv(buf.str());
}

namespace {

// Solve the 3x3 system m * x = rhs in place; partial pivoting.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> rhs) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        }
        if (std::abs(m[pivot][col]) < 1e-300) {
            throw std::runtime_error("hom_dip_fit: singular normal equations");
        }
        std::swap(m[col], m[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < 3; ++c) m[r][c] -= f * m[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    return {rhs[0] / m[0][0], rhs[1] / m[1][1], rhs[2] / m[2][2]};
}

struct DipModel {
    // f(d) = C (1 - V exp(-d^2 / (2 w^2)))
    static double eval(double d, double C, double V, double w) {
        return C * (1.0 - V * std::exp(-d * d / (2.0 * w * w)));
    }
    static std::array<double, 3> grad(double d, double C, double V, double w) {
        const double g = std::exp(-d * d / (2.0 * w * w));
        return {1.0 - V * g, -C * g, -C * V * g * d * d / (w * w * w)};
    }
};

double ssr_of(const std::vector<HomDipPoint>& pts, double C, double V, double w) {
    double s = 0.0;
    for (const auto& p : pts) {
        const double r = p.coincidences - DipModel::eval(p.delay_ps, C, V, w);
        s += r * r;
    }
    return s;
}

} // namespace

HomFit hom_dip_fit(const std::vector<HomDipPoint>& points) {
    if (points.size() < 5) {
        throw std::invalid_argument("hom_dip_fit: need at least 5 points spanning the dip");
    }

    double ymax = points.front().coincidences, ymin = points.front().coincidences;
    double dmin = points.front().delay_ps, dmax = points.front().delay_ps;
    for (const auto& p : points) {
        ymax = std::max(ymax, p.coincidences);
        ymin = std::min(ymin, p.coincidences);
        dmin = std::min(dmin, p.delay_ps);
        dmax = std::max(dmax, p.delay_ps);
    }
    if (ymax <= 0.0) throw std::invalid_argument("hom_dip_fit: nonpositive coincidence data");

    HomFit fit;
    if ((ymax - ymin) / ymax < 1e-12) {
        // flat: no dip to fit
        fit.visibility = {0.0, 0.0};
        fit.width_ps = 0.0;
        fit.baseline = ymax;
        fit.degenerate = true;
        return fit;
    }

    double C = ymax;
    double V = std::clamp(1.0 - ymin / ymax, 1e-6, 1.0);
    double w = 0.0;
    {
        // half-depth width estimate; e^{-d^2/2w^2} = 1/2 at d = 1.1774 w
        const double half = ymax - 0.5 * (ymax - ymin);
        double dhalf = 0.0;
        for (const auto& p : points) {
            if (p.coincidences < half) dhalf = std::max(dhalf, std::abs(p.delay_ps));
        }
        w = dhalf > 0.0 ? dhalf / 1.1774 : (dmax - dmin) / 8.0;
        if (w <= 0.0) w = 1.0;
    }

    double lambda = 1e-3;
    double ssr = ssr_of(points, C, V, w);
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
        std::array<std::array<double, 3>, 3> jtj{};
        std::array<double, 3> jtr{};
        for (const auto& p : points) {
            const auto g = DipModel::grad(p.delay_ps, C, V, w);
            const double r = p.coincidences - DipModel::eval(p.delay_ps, C, V, w);
            for (int i = 0; i < 3; ++i) {
                jtr[i] += g[i] * r;
                for (int j = 0; j < 3; ++j) jtj[i][j] += g[i] * g[j];
            }
        }
        auto damped = jtj;
        for (int i = 0; i < 3; ++i) damped[i][i] *= 1.0 + lambda;
        std::array<double, 3> step{};
        try {
            step = solve3(damped, jtr);
        } catch (const std::runtime_error&) {
            lambda *= 10.0;
            if (lambda > 1e12) break;
            continue;
        }
        const double Cn = C + step[0];
        const double Vn = V + step[1];
        const double wn = w + step[2];
        if (Cn <= 0.0 || wn <= 0.0 || !std::isfinite(Cn) || !std::isfinite(Vn) ||
            !std::isfinite(wn)) {
            lambda *= 10.0;
            if (lambda > 1e12) break;
            continue;
        }
        const double ssr_new = ssr_of(points, Cn, Vn, wn);
        if (ssr_new <= ssr) {
            const double rel = (ssr - ssr_new) / std::max(ssr, 1e-300);
            C = Cn;
            V = Vn;
            w = wn;
            ssr = ssr_new;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (rel < 1e-14) {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    if (!converged && lambda > 1e12) {
        throw std::runtime_error("hom_dip_fit: no convergence after bounded iterations");
    }

    // covariance from the undamped normal equations
    std::array<std::array<double, 3>, 3> jtj{};
    for (const auto& p : points) {
        const auto g = DipModel::grad(p.delay_ps, C, V, w);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) jtj[i][j] += g[i] * g[j];
        }
    }
    const double dof = static_cast<double>(points.size()) - 3.0;
    const double s2 = dof > 0.0 ? ssr / dof : 0.0;
    double var_v = 0.0;
    try {
        const std::array<double, 3> col = solve3(jtj, {0.0, 1.0, 0.0});
        var_v = s2 * col[1];
    } catch (const std::runtime_error&) {
        var_v = 0.0;
    }

    fit.visibility = {V, var_v > 0.0 ? std::sqrt(var_v) : 0.0};
    fit.width_ps = std::abs(w);
    fit.baseline = C;
    fit.degenerate = false;
    return fit;
}

} // namespace biloc
