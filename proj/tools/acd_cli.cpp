// acd: simulate, estimate and Monte Carlo front end for ACD(1,1) durations.

#include "acd/errors.hpp"
#include "acd/io.hpp"
#include "acd/lab.hpp"
#include "acd/qmle.hpp"
#include "acd/simulate.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifndef ACD_VERSION
#define ACD_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using acd::io::json;

namespace {

struct Gate {
    std::string name;
    double value;
    std::string threshold;
    bool pass;
};

json gates_json(const std::vector<Gate>& gates) {
    json out = json::array();
    for (const auto& g : gates) {
        out.push_back(
            json{{"name", g.name}, {"value", g.value}, {"threshold", g.threshold}, {"pass", g.pass}});
    }
    return out;
}

bool all_pass(const std::vector<Gate>& gates) {
    for (const auto& g : gates) {
        if (!g.pass) {
            return false;
        }
    }
    return true;
}

fs::path resolve_output(const std::string& out, const std::string& fallback_name) {
    if (!out.empty()) {
        return out;
    }
    const char* dir = std::getenv("ACD_OUTPUT_DIR");
    return fs::path(dir != nullptr && *dir != '\0' ? dir : ".") / fallback_name;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Writes <output>.manifest.json describing one command execution.
void write_manifest(const std::string& command, const json& config,
                    std::optional<acd::RngSeed> seed, const std::vector<fs::path>& outputs,
                    std::chrono::steady_clock::time_point started) {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json files = json::array();
    for (const auto& p : outputs) {
        files.push_back(json{{"path", p.string()},
                             {"bytes", fs::file_size(p)},
                             {"sha256", acd::io::sha256_file(p)}});
    }
    json manifest{{"command", command},
                  {"config", config},
                  {"seed", seed ? json(*seed) : json(nullptr)},
                  {"artifact_version", ACD_VERSION},
                  {"started_at", utc_timestamp()},
                  {"wall_clock_seconds", elapsed},
                  {"outputs", std::move(files)}};
    fs::path path = outputs.front();
    path += ".manifest.json";
    acd::io::write_json(path, manifest);
}

struct ParamFlags {
    std::optional<double> omega;
    std::optional<double> alpha;
    std::optional<double> beta;

    void add(CLI::App& app) {
        app.add_option("--omega", omega, "omega > 0");
        app.add_option("--alpha", alpha, "alpha > 0");
        app.add_option("--beta", beta, "beta > 0");
    }
    acd::AcdParams resolve(double d_omega, double d_alpha, double d_beta) const {
        return {omega.value_or(d_omega), alpha.value_or(d_alpha), beta.value_or(d_beta)};
    }
};

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    ParamFlags params;
    std::string law = "exponential";
    std::optional<double> horizon;
    std::optional<std::size_t> n;
    acd::RngSeed seed = 0;
    std::string out;
    std::optional<std::size_t> burn_in;
    bool allow_nonstationary = false;
};

int run_simulate(const SimulateArgs& args) {
    const auto started = std::chrono::steady_clock::now();
    if (!args.params.omega || !args.params.alpha || !args.params.beta) {
        throw acd::InvalidArgument("simulate requires --omega, --alpha and --beta");
    }
    if (args.horizon.has_value() == args.n.has_value()) {
        throw acd::InvalidArgument("simulate requires exactly one of --horizon and --n");
    }
    const acd::AcdParams params = args.params.resolve(0, 0, 0);
    const acd::InnovationLaw law = acd::InnovationLaw::parse(args.law);
    acd::SimulationOptions opts;
    opts.burn_in = args.burn_in;
    opts.allow_nonstationary = args.allow_nonstationary;

    const acd::DurationSeries series =
        args.horizon ? acd::simulate_horizon(params, law, *args.horizon, args.seed, opts)
                     : acd::simulate_fixed_n(params, law, *args.n, args.seed, opts);

    std::map<std::string, std::string> extra;
    if (args.burn_in) {
        extra["burn_in"] = std::to_string(*args.burn_in);
    }
    const fs::path out = resolve_output(args.out, "durations.txt");
    acd::io::write_durations(out, series, extra);

    json config{{"omega", params.omega()},
                {"alpha", params.alpha()},
                {"beta", params.beta()},
                {"law", law.to_string()},
                {"horizon", args.horizon ? json(*args.horizon) : json(nullptr)},
                {"n", args.n ? json(*args.n) : json(nullptr)},
                {"seed", args.seed},
                {"burn_in", args.burn_in ? json(*args.burn_in) : json(nullptr)},
                {"allow_nonstationary", args.allow_nonstationary},
                {"out", out.string()}};
    write_manifest("simulate", config, args.seed, {out}, started);
    std::cout << "wrote " << series.count() << " durations to " << out.string() << '\n';
    return 0;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
    std::string data;
    std::optional<double> horizon;
    std::string init = "sample-mean";
    double tol = 1e-9;
    std::size_t max_iter = 200;
    std::string reparam = "log";
    std::string out;
};

acd::InitStrategy parse_init(const std::string& text) {
    if (text == "sample-mean") {
        return acd::SampleMeanInit{};
    }
    if (text == "model") {
        return acd::ModelImpliedStart{};
    }
    if (text.rfind("fixed:", 0) == 0) {
        const std::string body = text.substr(6);
        const auto comma = body.find(',');
        if (comma != std::string::npos) {
            try {
                std::size_t used = 0;
                const std::string a = body.substr(0, comma);
                const std::string b = body.substr(comma + 1);
                const double x0 = std::stod(a, &used);
                if (used == a.size()) {
                    const double psi0 = std::stod(b, &used);
                    if (used == b.size()) {
                        return acd::InitialState{x0, psi0};
                    }
                }
            } catch (const std::logic_error&) {
            }
        }
    }
    throw acd::InvalidArgument("--init must be sample-mean, model or fixed:X0,PSI0 (got '" + text +
                               "')");
}

int run_estimate(const EstimateArgs& args) {
    const auto started = std::chrono::steady_clock::now();
    acd::EstimateOptions opts;
    opts.init_strategy = parse_init(args.init);
    opts.gradient_tolerance = args.tol;
    opts.max_iterations = args.max_iter;
    if (args.reparam == "log") {
        opts.reparam = acd::Reparam::LogParams;
    } else if (args.reparam == "raw") {
        opts.reparam = acd::Reparam::Raw;
    } else {
        throw acd::InvalidArgument("--reparam must be log or raw");
    }

    acd::io::DurationsFile file = acd::io::read_durations(fs::path(args.data));
    std::string horizon_source = file.series.horizon ? "file" : "last_event_time";
    if (args.horizon) {
        file.series = acd::DurationSeries::from_durations(std::move(file.series.durations),
                                                          *args.horizon);
        horizon_source = "flag";
    }
    const acd::EstimateResult result = acd::estimate(file.series, opts);

    json config{{"data", args.data},
                {"horizon", args.horizon ? json(*args.horizon) : json(nullptr)},
                {"init", args.init},
                {"tol", args.tol},
                {"max_iter", args.max_iter},
                {"reparam", args.reparam}};
    json notes = json::array();
    if (horizon_source == "last_event_time") {
        notes.push_back("no horizon given; T set to the last event time");
    }
    if (result.singular_information) {
        notes.push_back("information matrix singular; covariance fields omitted");
    }
    json report{{"command", "estimate"},
                {"config", config},
                {"horizon_source", horizon_source},
                {"result", acd::io::to_json(result)},
                {"notes", std::move(notes)}};
    const fs::path out = resolve_output(args.out, "estimate.json");
    config["out"] = out.string();
    acd::io::write_json(out, report);
    write_manifest("estimate", config, std::nullopt, {out}, started);

    std::cout << "theta_hat " << result.theta_hat.to_string() << " converged="
              << (result.converged ? "true" : "false") << " iterations=" << result.iterations
              << '\n';
    return result.converged ? 0 : static_cast<int>(acd::ExitCode::Numerical);
}

// ---------------------------------------------------------------------- mc

struct McArgs {
    std::string suite;
    ParamFlags params;
    std::string law = "exponential";
    std::optional<double> horizon;
    std::vector<double> horizons;
    std::size_t n = 10'000;
    std::vector<double> grid{0.25, 0.5, 0.75, 1.0};
    std::size_t reps = 500;
    acd::RngSeed seed = 1;
    std::string out;
    unsigned threads = 0;
    double tol = 1e-9;
    std::size_t max_iter = 200;
    std::size_t long_run_n = 1'000'000;
    double coverage = 0.95;
};

constexpr std::size_t kMinRepsForGates = 100;

int run_mc_suite(const McArgs& args) {
    const auto started = std::chrono::steady_clock::now();
    const acd::InnovationLaw law = acd::InnovationLaw::parse(args.law);
    acd::EstimateOptions est;
    est.gradient_tolerance = args.tol;
    est.max_iterations = args.max_iter;

    json config{{"suite", args.suite}, {"law", law.to_string()}, {"reps", args.reps},
                {"seed", args.seed},   {"tol", args.tol},        {"max_iter", args.max_iter}};
    json result;
    std::vector<Gate> gates;
    bool gated = true;

    auto base_config = [&](const acd::AcdParams& params, double horizon) {
        acd::lab::McConfig c;
        c.true_params = params;
        c.law = law;
        c.horizon = horizon;
        c.replications = args.reps;
        c.base_seed = args.seed;
        c.estimate_options = est;
        c.nominal_coverage = args.coverage;
        c.threads = args.threads;
        return c;
    };
    auto record_params = [&](const acd::AcdParams& p) { config["true_params"] = acd::io::to_json(p); };

    if (args.suite == "normality") {
        const acd::AcdParams params = args.params.resolve(0.1, 0.2, 0.7);
        const double horizon = args.horizon.value_or(2000.0);
        record_params(params);
        config["horizon"] = horizon;
        config["nominal_coverage"] = args.coverage;
        const auto report = acd::lab::run_mc(base_config(params, horizon));
        result = acd::io::to_json(report);
        if (args.reps >= kMinRepsForGates) {
            gates.push_back({"convergence_rate", report.convergence_rate, ">= 0.98",
                             report.convergence_rate >= 0.98});
            const char* names[] = {"omega", "alpha", "beta"};
            for (int j = 0; j < 3; ++j) {
                const double cov = report.coverage ? (*report.coverage)(j) : std::nan("");
                const double ks = report.normality_stats ? (*report.normality_stats)(j) : std::nan("");
                gates.push_back({std::string("coverage_") + names[j], cov, "[0.91, 0.98]",
                                 cov >= 0.91 && cov <= 0.98});
                gates.push_back({std::string("ks_") + names[j], ks, "< 0.06", ks < 0.06});
            }
        } else {
            gated = false;
        }
    } else if (args.suite == "counting-rate") {
        const acd::AcdParams params = args.params.resolve(0.1, 0.2, 0.7);
        std::vector<double> horizons = args.horizons;
        if (horizons.empty()) {
            horizons = {100.0, 1000.0, args.horizon.value_or(10'000.0)};
        }
        record_params(params);
        config["horizons"] = horizons;
        const auto report = acd::lab::counting_rate_check(base_config(params, horizons.back()),
                                                          horizons);
        result = acd::io::to_json(report);
        const auto& last = report.levels.back();
        const double rel = std::abs(last.mean_rate * report.mu - 1.0);
        gates.push_back({"mean_rate_relative_error", rel, "< 0.02", rel < 0.02});
        if (report.levels.size() >= 2) {
            const double first = report.levels.front().max_abs_dev;
            gates.push_back({"max_abs_dev_decrease", last.max_abs_dev,
                             "< " + acd::io::format_double(first), last.max_abs_dev < first});
        }
    } else if (args.suite == "rate-factor") {
        const acd::AcdParams params = args.params.resolve(2.0, 0.05, 0.55);
        const double horizon = args.horizon.value_or(5000.0);
        record_params(params);
        config["horizon"] = horizon;
        config["long_run_n"] = args.long_run_n;
        const auto report =
            acd::lab::rate_factor_probe(base_config(params, horizon), args.long_run_n);
        result = acd::io::to_json(report);
        gates.push_back(
            {"winner_to_runner_up", report.winner_to_runner_up, "<= 0.5", report.unique});
        gates.push_back({"cov_sqrtT_vs_mu_cov_sqrtn", report.identity_relative_error, "< 0.1",
                         report.identity_relative_error < 0.1});
    } else if (args.suite == "fclt") {
        acd::lab::FcltConfig c;
        c.theta0 = args.params.resolve(0.1, 0.2, 0.7);
        c.law = law;
        c.n = args.n;
        c.grid = args.grid;
        c.replications = args.reps;
        c.seed = args.seed;
        c.long_run_n = args.long_run_n;
        c.threads = args.threads;
        record_params(c.theta0);
        config["n"] = c.n;
        config["grid"] = c.grid;
        config["long_run_n"] = c.long_run_n;
        const auto report = acd::lab::functional_clt_probe(c);
        result = acd::io::to_json(report);
        gates.push_back({"max_relative_error", report.max_relative_error, "< 0.15",
                         report.max_relative_error < 0.15});
        gates.push_back({"max_abs_correlation", report.max_abs_correlation,
                         "< " + acd::io::format_double(report.band),
                         report.max_abs_correlation < report.band});
    } else if (args.suite == "breakdown") {
        acd::lab::BreakdownConfig c;
        c.params = acd::AcdParams::relaxed(args.params.omega.value_or(0.1),
                                           args.params.alpha.value_or(0.9),
                                           args.params.beta.value_or(0.2));
        c.law = law;
        if (!args.horizons.empty()) {
            c.horizons = args.horizons;
        }
        c.replications = args.reps;
        c.seed = args.seed;
        c.estimate_options = est;
        c.threads = args.threads;
        record_params(c.params);
        config["horizons"] = c.horizons;
        config["baseline"] = acd::io::to_json(c.baseline);
        const auto report = acd::lab::breakdown_demo(c);
        result = acd::io::to_json(report);
        gated = false;
    } else {
        throw acd::InvalidArgument("unknown suite '" + args.suite +
                                   "' (normality|counting-rate|rate-factor|fclt|breakdown)");
    }

    const bool pass = all_pass(gates);
    const fs::path out = resolve_output(args.out, "mc_" + args.suite + ".json");
    json report{{"command", "mc"},
                {"suite", args.suite},
                {"config", config},
                {"result", std::move(result)},
                {"gates", gates_json(gates)},
                {"gated", gated},
                {"pass", pass}};
    config["out"] = out.string();
    acd::io::write_json(out, report);
    write_manifest("mc", config, args.seed, {out}, started);

    for (const auto& g : gates) {
        std::cout << (g.pass ? "PASS " : "FAIL ") << g.name << " = "
                  << acd::io::format_double(g.value) << " (" << g.threshold << ")\n";
    }
    std::cout << "suite " << args.suite << (pass ? " passed" : " failed") << '\n';
    return pass ? 0 : static_cast<int>(acd::ExitCode::GateFailure);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ACD(1,1) duration model: simulation, QMLE and Monte Carlo checks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ACD_VERSION);

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "simulate an ACD(1,1) duration series");
    sim.params.add(*sim_cmd);
    sim_cmd->add_option("--law", sim.law, "exponential | weibull:K | gamma:A");
    sim_cmd->add_option("--horizon", sim.horizon, "observation window T");
    sim_cmd->add_option("--n", sim.n, "fixed number of durations");
    sim_cmd->add_option("--seed", sim.seed, "random seed");
    sim_cmd->add_option("--out", sim.out, "durations file");
    sim_cmd->add_option("--burn-in", sim.burn_in, "discarded warm-up draws");
    sim_cmd->add_flag("--allow-nonstationary", sim.allow_nonstationary,
                      "permit alpha + beta >= 1 with --horizon");

    EstimateArgs est;
    auto* est_cmd = app.add_subcommand("estimate", "QMLE on a durations file");
    est_cmd->add_option("--data", est.data, "durations file")->required();
    est_cmd->add_option("--horizon", est.horizon, "observation window T");
    est_cmd->add_option("--init", est.init, "sample-mean | fixed:X0,PSI0 | model");
    est_cmd->add_option("--tol", est.tol, "gradient tolerance");
    est_cmd->add_option("--max-iter", est.max_iter, "Newton iteration cap");
    est_cmd->add_option("--reparam", est.reparam, "log | raw");
    est_cmd->add_option("--out", est.out, "report file");

    McArgs mc;
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo suites");
    mc_cmd->add_option("--suite", mc.suite, "normality | counting-rate | rate-factor | fclt | breakdown")
        ->required();
    mc.params.add(*mc_cmd);
    mc_cmd->add_option("--law", mc.law, "exponential | weibull:K | gamma:A");
    mc_cmd->add_option("--horizon", mc.horizon, "observation window T");
    mc_cmd->add_option("--horizons", mc.horizons, "horizon grid (counting-rate, breakdown)");
    mc_cmd->add_option("--n", mc.n, "sample size (fclt)");
    mc_cmd->add_option("--grid", mc.grid, "fractions in [0, 1] (fclt)");
    mc_cmd->add_option("--reps", mc.reps, "replications");
    mc_cmd->add_option("--seed", mc.seed, "base seed");
    mc_cmd->add_option("--out", mc.out, "report file");
    mc_cmd->add_option("--threads", mc.threads, "worker threads (0 = all cores)");
    mc_cmd->add_option("--tol", mc.tol, "gradient tolerance");
    mc_cmd->add_option("--max-iter", mc.max_iter, "Newton iteration cap");
    mc_cmd->add_option("--long-run-n", mc.long_run_n, "length of the long reference run");
    mc_cmd->add_option("--coverage", mc.coverage, "nominal CI coverage");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(acd::ExitCode::Usage);
    }

    try {
        if (*sim_cmd) {
            return run_simulate(sim);
        }
        if (*est_cmd) {
            return run_estimate(est);
        }
        return run_mc_suite(mc);
    } catch (const acd::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(acd::ExitCode::Numerical);
    }
}
