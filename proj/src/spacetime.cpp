#include "biloc/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace biloc {

double margin(const SeparationCondition& c) {
    if (c.distance_m <= 0.0) {
        throw std::invalid_argument("margin: condition '" + c.label +
                                    "' has nonpositive distance");
    }
    if (c.elapses_ns.empty()) {
        throw std::invalid_argument("margin: condition '" + c.label + "' has no elapse");
    }
    for (double tau : c.elapses_ns) {
        if (tau < 0.0) {
            throw std::invalid_argument("margin: condition '" + c.label +
                                        "' has a negative elapse");
        }
    }
    const double light_ns = c.distance_m / kSpeedOfLightMPerS * 1e9;
    const double worst = c.relative_delay_ns +
                         *std::max_element(c.elapses_ns.begin(), c.elapses_ns.end());
    return light_ns - worst;
}

CausalityReport audit(const std::vector<SeparationCondition>& conditions) {
    if (conditions.empty()) throw std::invalid_argument("audit: no conditions given");
    CausalityReport report;
    report.all_satisfied = true;
    for (const auto& c : conditions) {
        ConditionReport r;
        r.label = c.label;
        r.margin_ns = margin(c);
        r.satisfied = r.margin_ns > 0.0;
        report.all_satisfied = report.all_satisfied && r.satisfied;
        report.conditions.push_back(std::move(r));
    }
    return report;
}

Geometry parse_geometry(const std::string& json_text) {
    const nlohmann::json doc = nlohmann::json::parse(json_text);
    Geometry g;
    for (const auto& rec : doc.at("conditions")) {
        SeparationCondition c;
        c.label = rec.at("label").get<std::string>();
        if (!rec.contains("distance_m")) {
            throw std::invalid_argument("geometry: condition '" + c.label +
                                        "' is missing distance_m");
        }
        c.distance_m = rec.at("distance_m").get<double>();
        if (c.distance_m <= 0.0) {
            throw std::invalid_argument("geometry: condition '" + c.label +
                                        "' has nonpositive distance_m");
        }
        c.relative_delay_ns = rec.at("relative_delay_ns").get<double>();
        for (const auto& tau : rec.at("elapses_ns")) c.elapses_ns.push_back(tau.get<double>());
        if (c.elapses_ns.empty()) {
            throw std::invalid_argument("geometry: condition '" + c.label +
                                        "' has an empty elapses_ns list");
        }
        g.conditions.push_back(std::move(c));
    }
    if (doc.contains("fibre_lengths_m")) {
        for (auto it = doc.at("fibre_lengths_m").begin(); it != doc.at("fibre_lengths_m").end();
             ++it) {
            g.fibre_lengths_m[it.key()] = it.value().get<double>();
        }
    }
    return g;
}

Geometry load_geometry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open geometry file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_geometry(buf.str());
}

std::string report_to_json(const CausalityReport& report) {
    nlohmann::json conditions = nlohmann::json::array();
    for (const auto& c : report.conditions) {
        conditions.push_back(nlohmann::json{
            {"label", c.label}, {"margin_ns", c.margin_ns}, {"satisfied", c.satisfied}});
    }
    return nlohmann::json{{"conditions", conditions}, {"all_satisfied", report.all_satisfied}}
        .dump(1);
}

std::string report_to_text(const CausalityReport& report) {
    std::size_t width = 9;
    for (const auto& c : report.conditions) width = std::max(width, c.label.size());
    std::ostringstream out;
    out << std::left;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-*s  %12s  %s\n", static_cast<int>(width), "condition",
                  "margin_ns", "satisfied");
    out << buf;
    for (const auto& c : report.conditions) {
        std::snprintf(buf, sizeof buf, "%-*s  %12.2f  %s\n", static_cast<int>(width),
                      c.label.c_str(), c.margin_ns, c.satisfied ? "yes" : "NO");
        out << buf;
    }
    out << (report.all_satisfied ? "all conditions satisfied\n" : "CAUSALITY VIOLATION\n");
    return out.str();
}

} // namespace biloc
