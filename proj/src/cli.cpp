#include "biloc/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "biloc/network_model.hpp"
#include "biloc/spacetime.hpp"
#include "biloc/statistics.hpp"

namespace biloc {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitBoundHolds = 3;

std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// BILOCAL_SEED wins over --seed when set.
std::uint64_t effective_seed(std::uint64_t flag_seed) {
    const char* env = std::getenv("BILOCAL_SEED");
    if (env == nullptr || *env == '\0') return flag_seed;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0') {
        throw std::invalid_argument("BILOCAL_SEED is not an unsigned integer: '" +
                                    std::string(env) + "'");
    }
    return static_cast<std::uint64_t>(v);
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write output file '" + path + "'");
    f << text;
}

struct B13Args {
    std::string table_path;
    double v = 1.0;
    double lam = 0.0;
    double p = 1.0;
    int n_boot = 2000;
    std::uint64_t seed = 1;
    std::string format = "text";
};

int cmd_b13(const B13Args& args, std::ostream& out) {
    B13Result result;
    bool have_sigma = false;
    double sigma = 0.0;
    if (!args.table_path.empty()) {
        ProbabilityTable table = ProbabilityTable::load(args.table_path);
        table.validate(1e-4);
        result = b13_from_table(table);
        if (table.has_sigmas()) {
            have_sigma = true;
            sigma = b13_with_error(table, args.n_boot, effective_seed(args.seed)).sigma;
        }
    } else {
        const NetworkConfig cfg = NetworkConfig::from_swapped_visibility(
            args.v, args.lam, args.p, TestMode::Bilocality);
        result = b13_from_model(cfg);
    }
    const bool violated = result.value > 1.0;
    if (args.format == "json") {
        nlohmann::json doc{{"I", result.I},
                           {"J", result.J},
                           {"b13", result.value},
                           {"violates_bilocal_bound", violated}};
        if (have_sigma) doc["sigma"] = sigma;
        out << doc.dump(1) << "\n";
    } else {
        out << "I   = " << fmt(result.I) << "\n";
        out << "J   = " << fmt(result.J) << "\n";
        out << "B13 = " << fmt(result.value);
        if (have_sigma) out << " +/- " << fmt(sigma);
        out << "\n";
        out << (violated ? "bilocal bound B13 <= 1 violated\n"
                         : "bilocal bound B13 <= 1 not violated\n");
    }
    return violated ? kExitOk : kExitBoundHolds;
}

struct ChshArgs {
    double v = 1.0;
    double lam = 0.0;
    double p = 1.0;
    std::string format = "text";
};

int cmd_chsh(const ChshArgs& args, std::ostream& out) {
    const NetworkConfig cfg =
        NetworkConfig::from_swapped_visibility(args.v, args.lam, args.p, TestMode::Chsh);
    const double s = chsh_from_model(cfg);
    const bool violated = s > 2.0;
    if (args.format == "json") {
        out << nlohmann::json{{"S", s}, {"violates_chsh_bound", violated}}.dump(1) << "\n";
    } else {
        out << "S = " << fmt(s) << "\n";
        out << (violated ? "CHSH bound S <= 2 violated\n" : "CHSH bound S <= 2 not violated\n");
    }
    return violated ? kExitOk : kExitBoundHolds;
}

struct SweepArgs {
    double p_min = 0.0;
    double p_max = 1.0;
    int steps = 11;
    double v = 0.93;
    double lam_low = 0.0;
    double lam_high = 1.0;
    std::string output;
};

int cmd_sweep(const SweepArgs& args, std::ostream& out) {
    std::vector<double> grid;
    grid.reserve(args.steps);
    for (int i = 0; i < args.steps; ++i) {
        grid.push_back(args.steps == 1
                           ? args.p_min
                           : args.p_min + (args.p_max - args.p_min) * i / (args.steps - 1));
    }
    const auto points = noise_sweep(grid, args.v, args.lam_low, args.lam_high);
    std::string csv = "p,b13_low,b13_high,s_low,s_high\n";
    for (const auto& pt : points) {
        csv += fmt(pt.p) + "," + fmt(pt.b13_low) + "," + fmt(pt.b13_high) + "," + fmt(pt.s_low) +
               "," + fmt(pt.s_high) + "\n";
    }
    write_output(args.output, csv, out);
    return kExitOk;
}

struct SimulateArgs {
    double v = 0.93;
    double lam = 0.0;
    double p = 1.0;
    std::uint64_t n = 8000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    std::string mode = "bilocality";
    std::string output;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
    const TestMode mode = args.mode == "chsh" ? TestMode::Chsh : TestMode::Bilocality;
    const NetworkConfig cfg = NetworkConfig::from_swapped_visibility(args.v, args.lam, args.p, mode);
    const CountsTable counts = sample_counts(cfg, args.n, effective_seed(args.seed), args.workers);
    write_output(args.output, counts.to_json() + "\n", out);
    return kExitOk;
}

struct AnalyzeArgs {
    std::string counts_path;
    std::string mode = "b13";
    int n_boot = 2000;
    std::uint64_t seed = 1;
    std::string format = "text";
};

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out) {
    const CountsTable counts = CountsTable::load(args.counts_path);
    const ProbabilityTable table = counts_to_table(counts);
    const std::uint64_t seed = effective_seed(args.seed);

    bool all_violated = true;
    nlohmann::json doc;
    std::string text;
    if (args.mode == "b13" || args.mode == "both") {
        const B13Result point = b13_from_table(table);
        const EstimateWithError est = b13_with_error(table, args.n_boot, seed);
        all_violated = all_violated && point.value > 1.0;
        doc["I"] = point.I;
        doc["J"] = point.J;
        doc["b13"] = point.value;
        doc["b13_sigma"] = est.sigma;
        text += "I   = " + fmt(point.I) + "\n";
        text += "J   = " + fmt(point.J) + "\n";
        text += "B13 = " + fmt(point.value) + " +/- " + fmt(est.sigma) + "\n";
    }
    if (args.mode == "chsh" || args.mode == "both") {
        const EstimateWithError est = chsh_with_error(table, args.n_boot, seed);
        all_violated = all_violated && est.value > 2.0;
        doc["S"] = est.value;
        doc["S_sigma"] = est.sigma;
        text += "S   = " + fmt(est.value) + " +/- " + fmt(est.sigma) + "\n";
    }
    if (args.format == "json") {
        out << doc.dump(1) << "\n";
    } else {
        out << text;
    }
    return all_violated ? kExitOk : kExitBoundHolds;
}

struct SpacetimeArgs {
    std::string geometry_path;
    std::string format = "text";
};

int cmd_spacetime(const SpacetimeArgs& args, std::ostream& out) {
    const Geometry geometry = load_geometry(args.geometry_path);
    const CausalityReport report = audit(geometry.conditions);
    out << (args.format == "json" ? report_to_json(report) + "\n" : report_to_text(report));
    return report.all_satisfied ? kExitOk : kExitBoundHolds;
}

struct HomArgs {
    double mu = -1.0;
    std::string data_path;
    std::string format = "text";
};

int cmd_hom(const HomArgs& args, std::ostream& out) {
    if (!args.data_path.empty()) {
        const auto points = load_hom_csv(args.data_path);
        const HomFit fit = hom_dip_fit(points);
        if (args.format == "json") {
            out << nlohmann::json{{"visibility", fit.visibility.value},
                                  {"visibility_sigma", fit.visibility.sigma},
                                  {"width_ps", fit.width_ps},
                                  {"baseline", fit.baseline},
                                  {"degenerate", fit.degenerate}}
                       .dump(1)
                << "\n";
        } else {
            out << "fitted visibility = " << fmt(fit.visibility.value) << " +/- "
                << fmt(fit.visibility.sigma) << "\n";
            out << "dip width (ps)    = " << fmt(fit.width_ps) << "\n";
            out << "baseline          = " << fmt(fit.baseline) << "\n";
            if (fit.degenerate) out << "flat data: dip width is degenerate\n";
        }
        return kExitOk;
    }
    if (args.mu < 0.0) {
        throw std::invalid_argument("hom: give either --mu or --data");
    }
    const double keep = hom_visibility_bound(args.mu, false);
    const double discard = hom_visibility_bound(args.mu, true);
    if (args.format == "json") {
        out << nlohmann::json{{"mu", args.mu},
                              {"bound_all_events", keep},
                              {"bound_discard_multi_clicks", discard}}
                   .dump(1)
            << "\n";
    } else {
        out << "HOM visibility bound, all events kept:      " << fmt(keep) << "\n";
        out << "HOM visibility bound, multi-clicks dropped: " << fmt(discard) << "\n";
    }
    return kExitOk;
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"two-source entanglement-swapping network: bilocality and CHSH toolkit"};
    app.require_subcommand(1);

    B13Args b13_args;
    auto* b13_cmd = app.add_subcommand("b13", "bilocality parameter from a table or the model");
    b13_cmd->add_option("--table", b13_args.table_path, "probability table JSON");
    b13_cmd->add_option("--v", b13_args.v, "swapped visibility v (sources at sqrt(v))");
    b13_cmd->add_option("--lam", b13_args.lam, "coloured-noise fraction");
    b13_cmd->add_option("--p", b13_args.p, "BSM noise parameter");
    b13_cmd->add_option("--n-boot", b13_args.n_boot, "bootstrap resamples for the error bar");
    b13_cmd->add_option("--seed", b13_args.seed, "bootstrap seed");
    b13_cmd->add_option("--format", b13_args.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    ChshArgs chsh_args;
    auto* chsh_cmd = app.add_subcommand("chsh", "CHSH value after swapping, conditioned on Psi-");
    chsh_cmd->add_option("--v", chsh_args.v, "swapped visibility v (sources at sqrt(v))");
    chsh_cmd->add_option("--lam", chsh_args.lam, "coloured-noise fraction");
    chsh_cmd->add_option("--p", chsh_args.p, "BSM noise parameter");
    chsh_cmd->add_option("--format", chsh_args.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "closed-form B13/S bands versus p as CSV");
    sweep_cmd->add_option("--p-min", sweep_args.p_min, "lowest p");
    sweep_cmd->add_option("--p-max", sweep_args.p_max, "highest p");
    sweep_cmd->add_option("--steps", sweep_args.steps, "grid size")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--v", sweep_args.v, "swapped visibility");
    sweep_cmd->add_option("--lam-low", sweep_args.lam_low, "lambda of the lower band edge");
    sweep_cmd->add_option("--lam-high", sweep_args.lam_high, "lambda of the upper band edge");
    sweep_cmd->add_option("--output", sweep_args.output, "CSV path ('-' for stdout)");

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "draw Monte Carlo counts from the model");
    sim_cmd->add_option("--v", sim_args.v, "swapped visibility");
    sim_cmd->add_option("--lam", sim_args.lam, "coloured-noise fraction");
    sim_cmd->add_option("--p", sim_args.p, "BSM noise parameter");
    sim_cmd->add_option("--n", sim_args.n, "trials per setting pair")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim_args.seed, "master seed");
    sim_cmd->add_option("--workers", sim_args.workers, "worker threads (0 = auto)");
    sim_cmd->add_option("--mode", sim_args.mode, "bilocality or chsh")
        ->check(CLI::IsMember({"bilocality", "chsh"}));
    sim_cmd->add_option("--output", sim_args.output, "counts JSON path ('-' for stdout)");

    AnalyzeArgs an_args;
    auto* an_cmd = app.add_subcommand("analyze", "estimate B13 / S from a counts file");
    an_cmd->add_option("--counts", an_args.counts_path, "counts JSON")->required();
    an_cmd->add_option("--mode", an_args.mode, "b13, chsh or both")
        ->check(CLI::IsMember({"b13", "chsh", "both"}));
    an_cmd->add_option("--n-boot", an_args.n_boot, "bootstrap resamples");
    an_cmd->add_option("--seed", an_args.seed, "bootstrap seed");
    an_cmd->add_option("--format", an_args.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    SpacetimeArgs st_args;
    auto* st_cmd = app.add_subcommand("spacetime", "audit space-like separation margins");
    st_cmd->add_option("--geometry", st_args.geometry_path, "geometry JSON")->required();
    st_cmd->add_option("--format", st_args.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    HomArgs hom_args;
    auto* hom_cmd = app.add_subcommand("hom", "HOM visibility bounds or dip fit");
    hom_cmd->add_option("--mu", hom_args.mu, "mean pair number per pulse");
    hom_cmd->add_option("--data", hom_args.data_path, "dip CSV (delay_ps,coincidences)");
    hom_cmd->add_option("--format", hom_args.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (b13_cmd->parsed()) return cmd_b13(b13_args, out);
        if (chsh_cmd->parsed()) return cmd_chsh(chsh_args, out);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_args, out);
        if (sim_cmd->parsed()) return cmd_simulate(sim_args, out);
        if (an_cmd->parsed()) return cmd_analyze(an_args, out);
        if (st_cmd->parsed()) return cmd_spacetime(st_args, out);
        if (hom_cmd->parsed()) return cmd_hom(hom_args, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    err << "error: no command\n";
    return kExitUsage;
}

} // namespace biloc
