#include <cmath>

#include <doctest.h>
#include <json.hpp>

#include "biloc/spacetime.hpp"

using namespace biloc;

namespace {

const char* kGeometryPath = BILOC_DATA_DIR "/paper_geometry.json";

} // namespace

TEST_CASE("margin against the published rows") {
    // L = 195 m, t = 74.3 ns, taus 160.2/154.4 ns: 415.95 ns, printed 415.50
    const SeparationCondition emission{"S1-S2", 195.0, 74.3, {160.2, 154.4}};
    CHECK(margin(emission) == doctest::Approx(415.95).epsilon(1e-4));
    CHECK(std::abs(margin(emission) - 415.50) < 1.0);

    const SeparationCondition qrnga{"QRNGA-S1", 104.0, 266.7, {35.5}};
    CHECK(margin(qrnga) == doctest::Approx(44.71).epsilon(1e-3));
    CHECK(std::abs(margin(qrnga) - 44.47) < 1.0);

    // light-like boundary: L = c (t + tau) has zero margin
    const double t = 100.0, tau = 50.0;
    const SeparationCondition boundary{
        "boundary", kSpeedOfLightMPerS * (t + tau) * 1e-9, t, {tau}};
    CHECK(std::abs(margin(boundary)) < 1e-9);
}

TEST_CASE("margin input validation") {
    CHECK_THROWS_AS(margin({"bad", -1.0, 0.0, {1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(margin({"bad", 10.0, 0.0, {}}), std::invalid_argument);
    CHECK_THROWS_AS(margin({"bad", 10.0, 0.0, {-2.0}}), std::invalid_argument);
}

TEST_CASE("margin monotonicity under unit perturbations") {
    const SeparationCondition base{"base", 200.0, 80.0, {40.0, 60.0}};
    const double m0 = margin(base);

    SeparationCondition longer = base;
    longer.distance_m += 1.0;
    CHECK(margin(longer) > m0);

    SeparationCondition later = base;
    later.relative_delay_ns += 1.0;
    CHECK(margin(later) < m0);

    for (std::size_t i = 0; i < base.elapses_ns.size(); ++i) {
        SeparationCondition slower = base;
        // bumping any tau by the slack to the max plus one strictly bites
        slower.elapses_ns[i] += 21.0;
        CHECK(margin(slower) < m0);
    }
}

TEST_CASE("audit of the bundled geometry matches the printed differences") {
    const Geometry g = load_geometry(kGeometryPath);
    REQUIRE(g.conditions.size() == 10);

    const double printed[10] = {415.50, 44.47, 695.43, 622.83, 44.47,
                                1150.87, 88.23, 206.53, 637.67, 879.77};
    const CausalityReport report = audit(g.conditions);
    CHECK(report.all_satisfied);
    REQUIRE(report.conditions.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(report.conditions[i].satisfied);
        CHECK(std::abs(report.conditions[i].margin_ns - printed[i]) <= 1.0);
    }

    // distances as published
    CHECK(g.conditions[0].distance_m == doctest::Approx(195.0));
    CHECK(g.conditions[1].distance_m == doctest::Approx(104.0));
    CHECK(g.conditions[2].distance_m == doctest::Approx(277.0));
    CHECK(g.conditions[3].distance_m == doctest::Approx(305.5));
    CHECK(g.conditions[4].distance_m == doctest::Approx(110.0));
    CHECK(g.conditions[5].distance_m == doctest::Approx(384.2));
    CHECK(g.conditions[6].distance_m == doctest::Approx(191.8));
    CHECK(g.conditions[7].distance_m == doctest::Approx(199.0));

    // fibre lengths ride along as metadata only
    REQUIRE(g.fibre_lengths_m.size() == 4);
    CHECK(g.fibre_lengths_m.at("Alice-S1") == doctest::Approx(110.98));
    CHECK(g.fibre_lengths_m.at("S1-Bob") == doctest::Approx(124.52));
    CHECK(g.fibre_lengths_m.at("Bob-S2") == doctest::Approx(108.13));
    CHECK(g.fibre_lengths_m.at("S2-Charlie") == doctest::Approx(124.55));
}

TEST_CASE("inflating a delay past its margin breaks that condition only") {
    Geometry g = load_geometry(kGeometryPath);
    const CausalityReport before = audit(g.conditions);
    g.conditions[3].relative_delay_ns += before.conditions[3].margin_ns + 1.0;
    const CausalityReport after = audit(g.conditions);
    CHECK_FALSE(after.all_satisfied);
    for (std::size_t i = 0; i < after.conditions.size(); ++i) {
        CHECK(after.conditions[i].satisfied == (i != 3));
    }
}

TEST_CASE("geometry parse errors name the offending condition") {
    CHECK_THROWS_AS(parse_geometry("not json"), nlohmann::json::parse_error);

    const char* missing_distance = R"({"conditions": [
        {"label": "broken", "relative_delay_ns": 1.0, "elapses_ns": [2.0]}]})";
    CHECK_THROWS_WITH_AS(parse_geometry(missing_distance),
                         doctest::Contains("broken"), std::invalid_argument);

    const char* negative_distance = R"({"conditions": [
        {"label": "neg", "distance_m": -5.0, "relative_delay_ns": 1.0, "elapses_ns": [2.0]}]})";
    CHECK_THROWS_AS(parse_geometry(negative_distance), std::invalid_argument);

    CHECK_THROWS_AS(audit({}), std::invalid_argument);
    CHECK_THROWS_AS(load_geometry("/nonexistent/geometry.json"), std::runtime_error);
}

TEST_CASE("report rendering carries every condition") {
    const Geometry g = load_geometry(kGeometryPath);
    const CausalityReport report = audit(g.conditions);

    const std::string text = report_to_text(report);
    for (const auto& c : report.conditions) {
        CHECK(text.find(c.label) != std::string::npos);
    }
    CHECK(text.find("all conditions satisfied") != std::string::npos);

    const std::string json = report_to_json(report);
    CHECK(json.find("\"all_satisfied\": true") != std::string::npos);
}
