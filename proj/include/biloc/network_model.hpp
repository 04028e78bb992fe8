// Tripartite outcome probabilities of the entanglement-swapping network,
// the bilocality parameter B13 = sqrt|I| + sqrt|J|, the swapped CHSH
// value S, their closed forms, visibility thresholds, and the exhaustive
// deterministic-strategy oracle.

#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "biloc/observables.hpp"
#include "biloc/states.hpp"

namespace biloc {

enum class TestMode { Bilocality, Chsh };

struct NetworkConfig {
    SourceNoise source1;  // feeds A and B
    SourceNoise source2;  // feeds B' and C
    BsmNoise bsm;
    std::array<MeasurementSetting, 2> settings_a;
    std::array<MeasurementSetting, 2> settings_c;
    TestMode mode = TestMode::Bilocality;

    static NetworkConfig bilocality(SourceNoise s1, SourceNoise s2, BsmNoise bsm);
    static NetworkConfig chsh(SourceNoise s1, SourceNoise s2, BsmNoise bsm);

    // Both sources at per-source visibility sqrt(v_swapped), lam colored
    // fraction, in the requested mode.
    static NetworkConfig from_swapped_visibility(double v_swapped, double lam, double p,
                                                 TestMode mode);
};

// P(a, b, c | x, z) over the 12 outcomes of each setting pair. Entries may
// carry one-standard-deviation uncertainties (experimental tables do).
class ProbabilityTable {
public:
    ProbabilityTable();

    void set(int x, int z, BsmOutcome b, int a, int c, double p,
             std::optional<double> sigma = std::nullopt);
    double at(int x, int z, BsmOutcome b, int a, int c) const;
    double sigma_at(int x, int z, BsmOutcome b, int a, int c) const;

    bool has(int x, int z, BsmOutcome b, int a, int c) const;
    bool block_complete(int x, int z) const;
    bool complete() const;
    bool has_sigmas() const;

    double block_sum(int x, int z) const;

    // Throws unless every block is complete, entries are nonnegative and
    // each block sums to 1 within tol.
    void validate(double tol) const;

    static ProbabilityTable from_json(const std::string& text);
    static ProbabilityTable load(const std::string& path);
    std::string to_json() const;

private:
    static std::size_t index(int x, int z, BsmOutcome b, int a, int c);
    std::array<double, 48> p_;
    std::array<double, 48> sigma_;
    std::array<bool, 48> present_;
};

// Tr[(P_a^x (x) F_b (x) P_c^z) rho_ABB'C]; F_b acts on Bob's middle pair.
double joint_probability(const NetworkConfig& cfg, int x, int z, BsmOutcome b, int a, int c);

// All 48 joint probabilities of cfg as a table (one block per x,z).
ProbabilityTable model_probability_table(const NetworkConfig& cfg);

// <A_x B^y C_z> = Tr[(A_x (x) B^y (x) C_z) rho].
double correlator(const NetworkConfig& cfg, int x, int y, int z);

// Signed sum over a complete (x,z) block: sum (-1)^(a+c) sign(b,y) P.
double correlator_from_table(const ProbabilityTable& t, int x, int y, int z);

// Correlators ordered (x,z) = (0,0), (0,1), (1,0), (1,1).
double bilocal_I(const std::array<double, 4>& corr_y0);
double bilocal_J(const std::array<double, 4>& corr_y1);

struct B13Result {
    double I = 0.0;
    double J = 0.0;
    double value = 0.0;
};

double b13(double I, double J);
B13Result b13_from_table(const ProbabilityTable& t);
B13Result b13_from_model(const NetworkConfig& cfg);

// B13 = sqrt|2 [vA(1-lamA)+lamA][vC(1-lamC)+lamC]| / sqrt3
//     + sqrt(p vA vC) / sqrt6
double b13_closed_form(double p, double vA, double lamA, double vC, double lamC);

// S = sqrt2 ( p vA vC + [vA(1-lamA)+lamA][vC(1-lamC)+lamC] )
double chsh_closed_form(double p, double vA, double lamA, double vC, double lamC);

// CHSH value from conditional correlators
// <A_x C_z> = sum (-1)^(a+c) P(a, Psi-, c | x, z) / sum P(a, Psi-, c | x, z).
// Throws when the Psi- success probability vanishes.
double chsh_from_model(const NetworkConfig& cfg);
double chsh_from_states(const DensityMatrix& rho_ab, const DensityMatrix& rho_bc,
                        const std::array<MeasurementSetting, 2>& settings_a,
                        const std::array<MeasurementSetting, 2>& settings_c, BsmNoise bsm);
double chsh_from_table(const ProbabilityTable& t);

struct SweepPoint {
    double p = 0.0;
    double b13_low = 0.0;   // lam = lam_low
    double b13_high = 0.0;  // lam = lam_high
    double s_low = 0.0;
    double s_high = 0.0;
};

// Closed-form bands versus p at per-source visibility sqrt(v_swapped);
// lower bound at lam_low, upper at lam_high.
std::vector<SweepPoint> noise_sweep(const std::vector<double>& p_grid, double v_swapped,
                                    double lam_low = 0.0, double lam_high = 1.0);

enum class Criterion { B13, Chsh };

// Swapped visibility V at which the criterion meets its classical bound
// (B13 = 1 or S = 2) for Werner sources, lam = 0, p = 1. Bisection on
// [0.01, 1], 60 iterations.
double threshold_visibility(Criterion which);

// Maximum of the objective over the 64 deterministic strategies
// a(x), c(z) in {0,1}^2 and fixed b0b1 in {0,1}^2.
double deterministic_strategy_max(Criterion objective);

} // namespace biloc
