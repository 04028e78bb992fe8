// Space-like separation audit: each condition compares the light travel
// time over a beeline distance against a relative delay plus event
// elapses. Signals run through fibre, but causality only cares about the
// straight-line distance over c.

#pragma once

#include <map>
#include <string>
#include <vector>

namespace biloc {

inline constexpr double kSpeedOfLightMPerS = 299792458.0;

struct SeparationCondition {
    std::string label;
    double distance_m = 0.0;             // beeline L
    double relative_delay_ns = 0.0;      // t
    std::vector<double> elapses_ns;      // tau values; margin uses the worst
};

// L/c - max_i(t + tau_i), in nanoseconds.
double margin(const SeparationCondition& c);

struct ConditionReport {
    std::string label;
    double margin_ns = 0.0;
    bool satisfied = false;
};

struct CausalityReport {
    std::vector<ConditionReport> conditions;
    bool all_satisfied = false;
};

CausalityReport audit(const std::vector<SeparationCondition>& conditions);

struct Geometry {
    std::vector<SeparationCondition> conditions;
    // informational only; fibre length never enters a margin
    std::map<std::string, double> fibre_lengths_m;
};

Geometry parse_geometry(const std::string& json_text);
Geometry load_geometry(const std::string& path);

std::string report_to_json(const CausalityReport& report);
std::string report_to_text(const CausalityReport& report);

} // namespace biloc
