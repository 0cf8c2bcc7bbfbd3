// Command-line front end: critical values, monitoring of CSV data, KPSS
// pre-checks, asymptotic constants and the Monte Carlo studies.

#include "seqmon/asymptotics.hpp"
#include "seqmon/cli_io.hpp"
#include "seqmon/critical_values.hpp"
#include "seqmon/dgp.hpp"
#include "seqmon/errors.hpp"
#include "seqmon/experiments.hpp"
#include "seqmon/stationarity.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using namespace seqmon;

namespace {

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
}

Json manifest(std::uint64_t seed, long reps, double wall) {
    return {{"tool", "seqmon"}, {"version", "0.1.0"}, {"seed", seed}, {"reps", reps}, {"wall_seconds", wall}};
}

struct CritvalsArgs {
    std::vector<double> gammas{0.0, 0.15, 0.25, 0.35, 0.45, 0.49};
    std::vector<double> alphas{0.01, 0.025, 0.05, 0.10, 0.25};
    std::string source = "table";
    SimulationSource sim;
    double c_star = 0.0;
};

int run_critvals(const CritvalsArgs& a) {
    Json out = Json::array();
    if (a.source == "simulation" || a.c_star > 0.0) {
        const double upper = a.c_star > 0.0 ? a.c_star / (1.0 + a.c_star) : 1.0;
        const auto samples = simulate_sup_wiener_multi(a.gammas, upper, a.sim.grid_size, a.sim.reps, a.sim.seed);
        for (const auto& s : samples) {
            for (double alpha : a.alphas) {
                out.push_back({{"gamma", s.gamma},
                               {"alpha", alpha},
                               {"c", s.quantile(1.0 - alpha)},
                               {"std_error", s.quantile_std_error(1.0 - alpha)},
                               {"bias_warning", s.gamma >= kGridBiasGamma},
                               {"source", a.c_star > 0.0 ? "simulated closed-end" : "simulated"},
                               {"grid", s.grid_size},
                               {"reps", s.reps},
                               {"seed", s.seed},
                               {"upper", s.upper}});
            }
        }
    } else {
        for (double g : a.gammas) {
            for (double alpha : a.alphas) {
                out.push_back({{"gamma", g}, {"alpha", alpha}, {"c", table_critical_value(g, alpha)}, {"source", "table"}});
            }
        }
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

struct MonitorArgs {
    std::string config;
    std::string data;
    std::string json_out;
    bool no_timestamp = false;
    bool quiet = false;
    long start = 0;
    long previous = 0;
};

int run_monitor(const MonitorArgs& a, bool remonitor) {
    MonitorRunConfig cfg = load_monitor_config(a.config);
    if (!a.data.empty()) cfg.data_path = a.data;
    if (cfg.data_path.empty()) throw ConfigError("no data file given (data.path or --data)");
    const Dataset ds = ingest_csv(cfg.data_path, cfg.columns);
    CommandOptions opts;
    opts.timestamp = !a.no_timestamp;
    const MonitorReport report =
        remonitor ? remonitor_command(cfg, ds, a.start, a.previous > 0 ? std::optional<long>(a.previous) : std::nullopt,
                                      opts)
                  : monitor_command(cfg, ds, opts);
    const fs::path json_path = a.json_out.empty() ? fs::path(cfg.output_dir) / "report.json" : fs::path(a.json_out);
    write_file(json_path, report.to_json() + "\n");
    if (!a.quiet) {
        std::cout << report.to_text();
        std::cout << "report: " << json_path.string() << '\n';
    }
    return 0;
}

struct KpssArgs {
    std::string file;
    std::string column;
    int bandwidth = -1;
    long first = 1;
    long last = 0;
};

int run_kpss(const KpssArgs& a) {
    const CsvTable table = read_csv_file(a.file);
    const std::size_t idx = table.column_index(a.column);
    const long n = static_cast<long>(table.rows.size());
    const long last = a.last > 0 ? a.last : n;
    if (a.first < 1 || last > n || a.first > last) throw DataError("row range outside the file");
    std::vector<double> x;
    for (long r = a.first; r <= last; ++r) {
        const std::string& cell = table.rows[static_cast<std::size_t>(r - 1)][idx];
        try {
            x.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw DataError("column '" + a.column + "', row " + std::to_string(r) + ": not a number");
        }
    }
    const KpssResult res = kpss_level(x, a.bandwidth >= 0 ? std::optional<int>(a.bandwidth) : std::nullopt);
    Json j{{"column", a.column},
           {"n", x.size()},
           {"statistic", res.statistic},
           {"bandwidth", res.bandwidth},
           {"degenerate", res.degenerate},
           {"reject", {{"10%", res.reject_10}, {"5%", res.reject_5}, {"1%", res.reject_1}}},
           {"critical_values", {{"10%", kKpssCritical10}, {"5%", kKpssCritical5}, {"1%", kKpssCritical1}}}};
    std::cout << j.dump(2) << '\n';
    return 0;
}

struct StudyArgs {
    std::string plan;
    std::string out = "results";
    long reps = 0;
};

int run_study(const StudyArgs& a, bool size) {
    ExperimentPlan plan = load_experiment_plan(a.plan);
    if (a.reps > 0) plan.reps = a.reps;
    const ExperimentReport report = size ? run_size_study(plan) : run_power_study(plan);
    const fs::path dir(a.out);
    const std::string stem = size ? "size" : "power";
    write_file(dir / (stem + ".csv"), report.to_csv());
    write_file(dir / (stem + ".json"), report.to_json() + "\n");
    if (size) write_file(dir / "size_horizons.csv", report.horizon_csv());
    Json m = manifest(plan.master_seed, plan.reps, report.wall_seconds);
    m["kind"] = stem;
    m["plan"] = a.plan;
    write_file(dir / "manifest.json", m.dump(2) + "\n");
    std::cout << report.to_csv();
    return 0;
}

int run_tau_density(const StudyArgs& a) {
    TauDensityRequest req = load_tau_density_request(a.plan);
    if (a.reps > 0) req.reps = a.reps;
    const TauDensity dens = tau_density(req);
    const fs::path dir(a.out);
    write_file(dir / "tau_histogram.csv", dens.histogram_csv());
    write_file(dir / "tau_density.csv", dens.density_csv());
    Json m = manifest(req.spec.seed, req.reps, 0.0);
    m["kind"] = "tau-density";
    m["spec"] = Json::parse(dgp_spec_to_json(req.spec));
    m["censored_fraction"] = dens.censored_fraction;
    m["detections"] = dens.taus.size();
    write_file(dir / "manifest.json", m.dump(2) + "\n");
    std::cout << "detections: " << dens.taus.size() << ", censored fraction: " << dens.censored_fraction << '\n';
    return 0;
}

struct GenArgs {
    std::string dgp;
    std::string spec;
    long M = 100;
    long s_star = 1;
    double delta_d = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    std::uint64_t rep = 0;
    long extra = 0;
    bool eps = false;
    std::string out;
};

int run_gen_data(const GenArgs& a) {
    DgpSpec spec;
    if (!a.spec.empty()) {
        std::ifstream in(a.spec);
        if (!in) throw ConfigError("cannot open spec '" + a.spec + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        spec = parse_dgp_spec(ss.str(), fs::path(a.spec).extension() == ".toml");
    } else if (!a.dgp.empty()) {
        try {
            spec = make_dgp(parse_dgp_id(a.dgp), a.M, a.s_star,
                            std::isnan(a.delta_d) ? std::nullopt : std::optional<double>(a.delta_d), a.seed);
        } catch (const ParameterError& e) {
            throw ConfigError(e.what());
        }
    } else {
        throw ConfigError("gen-data needs --dgp or --spec");
    }
    if (a.extra > 0) spec.extra_horizon = a.extra;
    const std::string csv = series_to_csv(simulate(spec, a.rep), a.eps);
    if (a.out.empty()) {
        std::cout << csv;
    } else {
        write_file(a.out, csv);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential monitoring of linear models with an autoregressive lag"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "seqmon 0.1.0");

    CritvalsArgs cv;
    auto* critvals = app.add_subcommand("critvals", "Critical values c(gamma, alpha)");
    critvals->add_option("--gamma", cv.gammas, "Boundary exponents")->delimiter(',');
    critvals->add_option("--alpha", cv.alphas, "Significance levels")->delimiter(',');
    critvals->add_option("--source", cv.source, "table or simulation")->check(CLI::IsMember({"table", "simulation"}));
    critvals->add_option("--grid", cv.sim.grid_size, "Grid points on the sup range");
    critvals->add_option("--reps", cv.sim.reps, "Monte Carlo replications");
    critvals->add_option("--seed", cv.sim.seed, "Seed");
    critvals->add_option("--closed-end", cv.c_star, "Closed-end horizon ratio N/M (simulation)");

    MonitorArgs mon;
    auto* monitor = app.add_subcommand("monitor", "Monitor a CSV dataset for a change");
    monitor->add_option("--config", mon.config, "TOML or JSON run configuration")->required()->check(CLI::ExistingFile);
    monitor->add_option("--data", mon.data, "CSV file (overrides data.path)");
    monitor->add_option("--json-out", mon.json_out, "Report path (default <output.dir>/report.json)");
    monitor->add_flag("--no-timestamp", mon.no_timestamp, "Omit the manifest timestamp");
    monitor->add_flag("--quiet", mon.quiet, "Only write the report");

    MonitorArgs remon;
    auto* remonitor = app.add_subcommand("remonitor", "Restart monitoring with a new training window");
    remonitor->add_option("--config", remon.config, "TOML or JSON run configuration")->required()->check(CLI::ExistingFile);
    remonitor->add_option("--start", remon.start, "First training row (1-based)")->required();
    remonitor->add_option("--previous-detection", remon.previous, "Row of the previous detection");
    remonitor->add_option("--data", remon.data, "CSV file (overrides data.path)");
    remonitor->add_option("--json-out", remon.json_out, "Report path");
    remonitor->add_flag("--no-timestamp", remon.no_timestamp, "Omit the manifest timestamp");
    remonitor->add_flag("--quiet", remon.quiet, "Only write the report");

    KpssArgs kp;
    auto* kpss = app.add_subcommand("kpss", "KPSS level-stationarity statistic of one column");
    kpss->add_option("file", kp.file, "CSV file")->required()->check(CLI::ExistingFile);
    kpss->add_option("--column", kp.column, "Column name")->required();
    kpss->add_option("--bandwidth", kp.bandwidth, "Bartlett bandwidth (default automatic)");
    kpss->add_option("--first", kp.first, "First row (1-based)");
    kpss->add_option("--last", kp.last, "Last row (1-based, default end)");

    auto* asym = app.add_subcommand("asymptotics", "Stopping-time approximation constants");
    asym->require_subcommand(1);
    double delta = 1.0, c = 2.2365, sigma = 1.0, gamma = 0.0, fa1 = 1.0, fb1 = 1.0, beta0_d = 0.25, x = 0.0;
    double ddbar = 1.25;
    long M = 100, s_star = 1;
    auto* ambm = asym->add_subcommand("am-bm", "Centre and scale under a stationary change");
    ambm->add_option("--delta", delta)->required();
    auto* cmdm = asym->add_subcommand("cm-dm", "Centre and scale under a unit-root change");
    cmdm->add_option("--fa1", fa1)->required();
    cmdm->add_option("--fb1", fb1)->required();
    cmdm->add_option("--beta0-d", beta0_d);
    auto* expl = asym->add_subcommand("explosive", "Threshold and limit-CDF argument under an explosive change");
    expl->add_option("--delta-d", ddbar)->required();
    expl->add_option("--beta0-d", beta0_d);
    expl->add_option("--s-star", s_star);
    expl->add_option("--x", x);
    RwLimitParams rw;
    auto* rwl = asym->add_subcommand("rw-limit", "Simulated limit probability under a unit-root change");
    rwl->add_option("--x", rw.x)->required();
    rwl->add_option("--beta0-d", rw.beta0_d);
    rwl->add_option("--fb1", rw.fb1);
    rwl->add_option("--fa1-bar", rw.fa1_bar);
    rwl->add_option("--reps", rw.reps);
    rwl->add_option("--grid", rw.grid_per_unit);
    rwl->add_option("--seed", rw.seed);
    for (auto* sub : {ambm, cmdm, expl, rwl}) {
        sub->add_option("--c", c, "Critical value");
        sub->add_option("--sigma", sigma, "Error standard deviation");
        sub->add_option("--gamma", gamma, "Boundary exponent");
    }
    for (auto* sub : {ambm, cmdm, expl}) sub->add_option("--M", M, "Training size");

    StudyArgs size_args, power_args, dens_args;
    auto* sim_size = app.add_subcommand("simulate-size", "False-detection rates under no change");
    sim_size->add_option("--plan", size_args.plan)->required()->check(CLI::ExistingFile);
    sim_size->add_option("--out", size_args.out, "Results directory");
    sim_size->add_option("--reps", size_args.reps, "Override the plan's replications");
    auto* sim_power = app.add_subcommand("simulate-power", "Empirical power under a change");
    sim_power->add_option("--plan", power_args.plan)->required()->check(CLI::ExistingFile);
    sim_power->add_option("--out", power_args.out, "Results directory");
    sim_power->add_option("--reps", power_args.reps, "Override the plan's replications");
    auto* dens = app.add_subcommand("tau-density", "Empirical distribution of the stopping time");
    dens->add_option("--spec", dens_args.plan)->required()->check(CLI::ExistingFile);
    dens->add_option("--out", dens_args.out, "Results directory");
    dens->add_option("--reps", dens_args.reps, "Override the spec's replications");

    GenArgs gen;
    auto* gendata = app.add_subcommand("gen-data", "Write one simulated path as CSV");
    gendata->add_option("--dgp", gen.dgp, "Built-in design i..xii");
    gendata->add_option("--spec", gen.spec, "TOML or JSON design file");
    gendata->add_option("--M", gen.M);
    gendata->add_option("--s-star", gen.s_star);
    gendata->add_option("--delta-d", gen.delta_d);
    gendata->add_option("--seed", gen.seed);
    gendata->add_option("--rep", gen.rep, "Replication index");
    gendata->add_option("--extra", gen.extra, "Observations after the training window");
    gendata->add_flag("--eps", gen.eps, "Include the error column");
    gendata->add_option("--out", gen.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*critvals) return run_critvals(cv);
        if (*monitor) return run_monitor(mon, false);
        if (*remonitor) return run_monitor(remon, true);
        if (*kpss) return run_kpss(kp);
        if (*sim_size) return run_study(size_args, true);
        if (*sim_power) return run_study(power_args, false);
        if (*dens) return run_tau_density(dens_args);
        if (*gendata) return run_gen_data(gen);
        if (*asym) {
            Json j;
            if (*ambm) {
                const auto r = am_bm(delta, M, c, sigma, gamma);
                j = {{"a_M", r.center}, {"b_M", r.scale}};
            } else if (*cmdm) {
                const auto r = cm_dm(fa1, fb1, M, c, sigma, gamma, beta0_d);
                const auto p = cm_dm_printed(fa1, fb1, M, c, sigma, gamma, beta0_d);
                j = {{"c_M", r.center}, {"d_M", r.scale}, {"printed_c_M", p.center}, {"printed_d_M", p.scale}};
            } else if (*expl) {
                const auto r = explosive_threshold({ddbar, beta0_d, s_star}, M, gamma, x, c, sigma);
                j = {{"location", r.location}, {"cdf_argument", r.cdf_argument}};
            } else {
                rw.c = c;
                rw.sigma = sigma;
                rw.gamma = gamma;
                j = {{"x", rw.x}, {"probability", simulate_rw_limit(rw)}, {"reps", rw.reps}};
            }
            std::cout << j.dump(2) << '\n';
            return 0;
        }
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return 0;
}
