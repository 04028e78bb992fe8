// Monte Carlo emulation of the coincidence experiment, Poisson count
// analysis, parametric-bootstrap error bars, and the small estimators the
// experiment reports (visibility, noise parameter, basis-choice fidelity,
// HOM bounds and dip fitting).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biloc/network_model.hpp"

namespace biloc {

class CountsTable {
public:
    CountsTable();

    void set_trials(int x, int z, std::uint64_t n);
    std::uint64_t trials(int x, int z) const;

    void add(int x, int z, BsmOutcome b, int a, int c, std::uint64_t n);
    std::uint64_t count(int x, int z, BsmOutcome b, int a, int c) const;

    std::uint64_t block_total(int x, int z) const;

    static CountsTable from_json(const std::string& text);
    static CountsTable load(const std::string& path);
    std::string to_json() const;

private:
    static std::size_t index(int x, int z, BsmOutcome b, int a, int c);
    std::array<std::uint64_t, 48> counts_;
    std::array<std::uint64_t, 4> trials_;
};

struct EstimateWithError {
    double value = 0.0;
    double sigma = 0.0;
};

// Draws n_trials outcomes per (x,z) block from the joint distribution of
// cfg. Work is split into fixed 64k-trial chunks, each with its own
// derived stream, so the result is identical for any worker count.
// n_workers = 0 picks hardware concurrency.
CountsTable sample_counts(const NetworkConfig& cfg, std::uint64_t n_trials_per_setting,
                          std::uint64_t seed, unsigned n_workers = 0);

// p = count/trials with Poisson sigma sqrt(count)/trials; zero counts get
// the conservative sigma 1/trials.
ProbabilityTable counts_to_table(const CountsTable& counts);

// Parametric bootstrap: every probability perturbed by its sigma, clamped
// at zero, renormalized per (x,z) block; sigma is the standard deviation
// of the statistic over n_boot resamples.
EstimateWithError b13_with_error(const ProbabilityTable& t, int n_boot, std::uint64_t seed);
EstimateWithError chsh_with_error(const ProbabilityTable& t, int n_boot, std::uint64_t seed);

// (C_max - C_min)/(C_max + C_min)
double visibility_estimate(std::uint64_t c_max, std::uint64_t c_min);

// p = (C_D - C(d))/C_D, C_D the coincidences at complete distinguishability.
double noise_parameter(double c_delay, double c_dist);

// F_m = C_r/(C_r + C_w)
double qrng_basis_fidelity(std::uint64_t c_right, std::uint64_t c_wrong);

// V = (4F - 1)/3 for F in [1/4, 1].
double fidelity_to_visibility(double fidelity);

// Multi-pair ceiling on the HOM visibility: (1+8mu)/(1+12mu), improved to
// (1+4mu)/(1+6mu) when multi-click events are discarded.
double hom_visibility_bound(double mu, bool discard_multi_clicks);

struct HomDipPoint {
    double delay_ps = 0.0;
    double coincidences = 0.0;
};

std::vector<HomDipPoint> load_hom_csv(const std::string& path);
std::vector<HomDipPoint> parse_hom_csv(const std::string& text);

struct HomFit {
    EstimateWithError visibility;
    double width_ps = 0.0;  // Gaussian width w of the dip
    double baseline = 0.0;  // C_inf far from the dip
    bool degenerate = false;  // flat data; width is meaningless
};

// Least-squares fit of C(d) = C_inf (1 - V exp(-d^2/(2 w^2))). The
// visibility sigma comes from the fit covariance.
HomFit hom_dip_fit(const std::vector<HomDipPoint>& points);

} // namespace biloc
