#include <doctest.h>
#include <json.hpp>
#include <seqmon/cli_io.hpp>
#include <seqmon/errors.hpp>
#include <seqmon/rng.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace seqmon;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    static const fs::path dir = [] {
        auto p = fs::temp_directory_path() / ("seqmon_cli_io_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// y_t = mu_t + 0.25 y_{t-1} + 0.5 x_t + eps_t with mu_t stepping up by `jump`
// after each row listed in `changes` (1-based rows, row 1 has y_0 = 0 as lag).
Dataset synthetic(long n, const std::vector<long>& changes, double jump, std::uint64_t seed) {
    Rng rng(seed);
    Dataset d;
    d.exog.resize(n, 1);
    double lag = 0.0;
    for (long t = 1; t <= n; ++t) {
        double mu = 0.1;
        for (long c : changes) {
            if (t > c) mu += jump;
        }
        const double x = rng.normal();
        const double y = mu + 0.25 * lag + 0.5 * x + rng.normal();
        d.exog(t - 1, 0) = x;
        d.y.push_back(y);
        d.dates.push_back("r" + std::to_string(t));
        lag = y;
    }
    d.exog_names = {"x"};
    return d;
}

MonitorRunConfig base_config(long M) {
    MonitorRunConfig cfg;
    cfg.columns.response = {"y"};
    cfg.columns.exog = {{"x"}};
    cfg.M = M;
    cfg.gamma = 0.45;
    cfg.alpha = 0.05;
    cfg.output_dir = (scratch_dir() / "out").string();
    return cfg;
}

const CommandOptions kQuiet{.write_trajectory = false, .timestamp = false};

}  // namespace

TEST_CASE("transforms") {
    const std::vector<double> raw{100, 110, 121};
    SUBCASE("diff_log") {
        const auto v = apply_transform(raw, {"a", ColumnTransform::Op::DiffLog});
        REQUIRE(v.size() == 3);
        CHECK(std::isnan(v[0]));
        CHECK(v[1] == doctest::Approx(std::log(1.1)).epsilon(1e-14));
        CHECK(v[2] == doctest::Approx(std::log(1.1)).epsilon(1e-14));
        CsvTable t{{"a"}, {{"100"}, {"110"}, {"121"}}};
        const auto ds = ingest_csv(t, {.response = {"a", ColumnTransform::Op::DiffLog}});
        CHECK(ds.y.size() == 2);
        CHECK(ds.offset == 1);
    }
    SUBCASE("identity") { CHECK(apply_transform(raw, {"a"}) == raw); }
    SUBCASE("lags") {
        const auto v = apply_transform(raw, {"a", ColumnTransform::Op::Lag, 2});
        CHECK(std::isnan(v[1]));
        CHECK(v[2] == 100.0);
        const auto w = apply_transform(raw, {"a", ColumnTransform::Op::DiffLogThenLag, 1});
        CHECK(std::isnan(w[1]));
        CHECK(w[2] == doctest::Approx(std::log(1.1)));
        CHECK(ColumnTransform{"a", ColumnTransform::Op::DiffLogThenLag, 3}.depth() == 4);
        CHECK(ColumnTransform{"a", ColumnTransform::Op::Lag, 2}.describe() == "lag(2)");
    }
    SUBCASE("zero under diff_log names the row") {
        const std::vector<double> bad{1.0, 2.0, 0.0, 3.0};
        try {
            apply_transform(bad, {"ip", ColumnTransform::Op::DiffLog});
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("row 3") != std::string::npos);
            CHECK(std::string(e.what()).find("ip") != std::string::npos);
        }
    }
    SUBCASE("lag depth must be positive") {
        CHECK_THROWS(ColumnTransform{"a", ColumnTransform::Op::Lag, 0}.validate());
        CHECK_THROWS_AS(parse_transform_op("log"), ConfigError);
    }
}

TEST_CASE("alignment drops the deepest transform's rows") {
    std::ostringstream csv;
    csv << "date,y,a,b\n";
    for (int i = 1; i <= 10; ++i) csv << "d" << i << ',' << i << ',' << 10 + i << ',' << 20 + i << '\n';
    std::istringstream in(csv.str());
    const auto table = read_csv(in);
    const ColumnMap map{.date_column = "date",
                        .response = {"y", ColumnTransform::Op::DiffLog},
                        .exog = {{"a", ColumnTransform::Op::Lag, 3}, {"b", ColumnTransform::Op::DiffLogThenLag, 1}}};
    const auto ds = ingest_csv(table, map);
    CHECK(ds.offset == 3);
    CHECK(ds.y.size() == 7);
    CHECK(ds.dates.front() == "d4");
    CHECK(ds.y.front() == doctest::Approx(std::log(4.0 / 3.0)));
    CHECK(ds.exog(0, 0) == 11.0);
    CHECK(ds.exog(0, 1) == doctest::Approx(std::log(23.0 / 22.0)));
    for (const auto& t : map.exog) CHECK(t.depth() <= ds.offset);
}

TEST_CASE("CSV reader") {
    SUBCASE("quotes and BOM") {
        std::istringstream in("\xEF\xBB\xBF" "date,\"value, usd\"\n\"2001-01\",\"1.5\"\n2001-02,2\n");
        const auto t = read_csv(in);
        CHECK(t.header == std::vector<std::string>{"date", "value, usd"});
        CHECK(t.rows.size() == 2);
        CHECK(t.column_index("value, usd") == 1);
    }
    SUBCASE("ragged rows") {
        std::istringstream in("a,b\n1,2\n3\n");
        CHECK_THROWS_AS(read_csv(in), DataError);
    }
    SUBCASE("missing column and bad number") {
        std::istringstream in("a,b\n1,x\n");
        const auto t = read_csv(in);
        CHECK_THROWS_AS(t.column_index("c"), DataError);
        CHECK_THROWS_AS(ingest_csv(t, {.response = {"b"}}), DataError);
    }
}

TEST_CASE("monitor configuration documents") {
    const std::string toml = R"(
[data]
path = "data.csv"
date_column = "date"
response = { column = "ip", transform = "diff_log" }
exog = [ { column = "cpi", transform = "diff_log_then_lag", k = 1 } ]

[training]
start = 2
M = 36

[monitor]
gamma = 0.45
alpha = 0.05

[critical_value]
source = "table"
)";
    const auto cfg = parse_monitor_config(toml, true);
    CHECK(cfg.M == 36);
    CHECK(cfg.training_start == 2);
    CHECK(cfg.columns.response.op == ColumnTransform::Op::DiffLog);
    REQUIRE(cfg.columns.exog.size() == 1);
    CHECK(cfg.columns.exog[0].k == 1);
    CHECK(cfg.corrected);
    CHECK(cfg.max_steps == kDefaultMaxSteps);

    const auto json = monitor_config_to_json(cfg);
    const auto again = parse_monitor_config(json, false);
    CHECK(monitor_config_to_json(again) == json);

    SUBCASE("errors") {
        CHECK_THROWS_AS(parse_monitor_config("[training]\nM = 36\n[monitor]\ngamma = 0.1\nalpha = 0.05\n", true),
                        ConfigError);
        CHECK_THROWS_AS(parse_monitor_config(R"({"data": {"response": {"column": "y"}}, "training": {"M": 36},
                        "monitor": {"gamma": 0.1, "alpha": 0.05, "colour": 1}})", false), ConfigError);
        CHECK_THROWS_AS(parse_monitor_config(R"({"data": {"response": {"column": "y"}}, "training": {"M": "36"},
                        "monitor": {"gamma": 0.1, "alpha": 0.05}})", false), ConfigError);
        CHECK_THROWS_AS(parse_monitor_config(R"({"data": {"response": {"column": "y"}}, "training": {"M": 36},
                        "monitor": {"gamma": 0.5, "alpha": 0.05}})", false), ConfigError);
        CHECK_THROWS_AS(parse_monitor_config(R"({"data": {"response": {"column": "y"}}, "training": {"M": 1},
                        "monitor": {"gamma": 0.1, "alpha": 0.05}})", false), ConfigError);
        CHECK_THROWS_AS(parse_monitor_config("{not json", false), ConfigError);
        try {
            parse_monitor_config("[training\n", true);
            FAIL("expected a parse error");
        } catch (const std::exception& e) {
            CHECK(exit_code_for(e) == 2);
        }
    }
}

TEST_CASE("experiment plans and density requests") {
    const auto plan = parse_experiment_plan(R"(
dgps = ["vii", "viii"]
M = [50]
gamma = [0.0]
alpha = [0.10]
delta_d = [0.90]
reps = 100
horizon_multiple = 1
seed = 7
)",
                                            true);
    CHECK(plan.dgps == std::vector<DgpId>{DgpId::VII, DgpId::VIII});
    CHECK(plan.horizon_multiple == 1);
    CHECK(plan.master_seed == 7);
    CHECK_THROWS_AS(parse_experiment_plan(R"({"dgps": ["xiv"]})", false), ConfigError);
    CHECK_THROWS_AS(parse_experiment_plan(R"({"dgps": ["i"], "reps": 0})", false), ConfigError);
    CHECK_THROWS_AS(parse_experiment_plan(R"({"dgps": ["i"], "horizon": 3})", false), ConfigError);

    const auto req = parse_tau_density_request(R"(
gamma = 0.45
alpha = 0.05
reps = 50
[dgp]
dgp = "xii"
M = 100
delta_d = 1.25
)",
                                               true);
    CHECK(req.spec.name == "xii");
    CHECK(req.setting.c == 2.7992);
    CHECK(req.reps == 50);

    const auto custom = parse_dgp_spec(R"({"regressors": {"kind": "ar1", "rho": [0.5]},
        "errors": {"kind": "garch", "omega": 0.2, "phi": 0.3, "psi": 0.3},
        "beta0_bar": [0.1, 0.2], "beta0_d": 0.3, "M": 40,
        "change": {"s_star": 2, "delta_bar": [0.5, 0.2], "delta_d": 0.3}})",
                                       false);
    CHECK(custom.d() == 3);
    CHECK(custom.extra_horizon == 400);
    CHECK(parse_dgp_spec(dgp_spec_to_json(custom), false).beta0_bar == custom.beta0_bar);
    const auto series = simulate(custom, 0);
    const auto csv = series_to_csv(series, true);
    CHECK(csv.substr(0, csv.find('\n')) == "t,y,x2,eps");
}

TEST_CASE("monitoring a dataset") {
    SUBCASE("no monitored rows gives censored(0)") {
        const auto data = synthetic(61, {}, 0.0, 1);
        const auto r = monitor_command(base_config(60), data, kQuiet);
        CHECK(r.censored);
        CHECK_FALSE(r.tau);
        CHECK(r.steps_monitored == 0);
        CHECK(r.censor_value == 0);
        CHECK(r.training_first_row == 2);
        CHECK(r.warnings.size() == 1);
    }
    SUBCASE("explicit y0 keeps row 1 in the window") {
        auto cfg = base_config(60);
        cfg.y0 = 0.0;
        const auto r = monitor_command(cfg, synthetic(100, {}, 0.0, 1), kQuiet);
        CHECK(r.training_first_row == 1);
        CHECK(r.training_last_row == 60);
        CHECK(r.warnings.empty());
    }
    SUBCASE("window beyond the data") {
        CHECK_THROWS_AS(monitor_command(base_config(60), synthetic(50, {}, 0.0, 1), kQuiet), DataError);
    }
    SUBCASE("closed-end runs report N + 1") {
        auto cfg = base_config(60);
        cfg.closed_end_N = 30;
        cfg.c_override = 1e6;
        const auto r = monitor_command(cfg, synthetic(200, {}, 0.0, 2), kQuiet);
        CHECK(r.censored);
        CHECK(r.censor_value == 31);
        CHECK(r.c_source == "override");
    }
    SUBCASE("closed-end with a table value warns") {
        auto cfg = base_config(60);
        cfg.closed_end_N = 30;
        const auto r = monitor_command(cfg, synthetic(200, {}, 0.0, 2), kQuiet);
        CHECK(std::any_of(r.warnings.begin(), r.warnings.end(),
                          [](const std::string& w) { return w.find("closed-end") != std::string::npos; }));
    }
}

TEST_CASE("detections come after the injected change") {
    // Generous c: the 1% value for gamma .25, over a 10M horizon.
    const long M = 100, s_star = 20;
    auto cfg = base_config(M);
    cfg.gamma = 0.25;
    cfg.alpha = 0.01;
    int after = 0;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        auto spec = make_dgp(DgpId::V, M, s_star, std::nullopt, seed);
        spec.extra_horizon = 10 * M;
        const auto s = simulate(spec, 0);
        Dataset d;
        d.y.assign(s.y.begin() + 1, s.y.end());
        d.exog = s.exog.bottomRows(static_cast<Eigen::Index>(d.y.size()));
        for (std::size_t t = 0; t < d.y.size(); ++t) d.dates.push_back(std::to_string(t + 1));
        auto c = cfg;
        c.y0 = s.y[0];
        c.columns.exog = {{"x2"}, {"x3"}, {"x4"}, {"x5"}};
        const auto r = monitor_command(c, d, kQuiet);
        if (r.tau && *r.tau > s_star) ++after;
    }
    CHECK(after >= 990);
}

TEST_CASE("reports are deterministic and isolate the timestamp") {
    const auto data = synthetic(400, {250}, 1.0, 3);
    auto cfg = base_config(100);
    const auto a = monitor_command(cfg, data, {.write_trajectory = true, .timestamp = false});
    const auto b = monitor_command(cfg, data, {.write_trajectory = true, .timestamp = false});
    CHECK(a.to_json() == b.to_json());
    REQUIRE(a.tau);
    CHECK(a.date == "r" + std::to_string(101 + *a.tau));
    const auto stamped = monitor_command(cfg, data, {.write_trajectory = true, .timestamp = true});
    auto j = nlohmann::json::parse(stamped.to_json());
    CHECK(j["manifest"]["timestamp"].is_string());
    j["manifest"]["timestamp"] = nullptr;
    CHECK(j == nlohmann::json::parse(a.to_json()));
    for (const char* key : {"tau", "censored", "date", "gamma", "alpha", "c", "c_source", "M", "sigma_hat",
                            "trajectory_path", "manifest"}) {
        CHECK(j.contains(key));
    }
    const auto traj = read_file(a.trajectory_path);
    CHECK(traj.substr(0, traj.find('\n')) == "s,detector,boundary,decision");
    long lines = 0;
    for (char ch : traj) lines += ch == '\n';
    CHECK(lines == *a.tau + 1);
    CHECK(a.to_text().find("change detected") != std::string::npos);
}

TEST_CASE("re-monitoring") {
    SUBCASE("second change is found after moving the window") {
        int found = 0;
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            const auto data = synthetic(700, {200, 450}, 1.0, seed);
            auto cfg = base_config(100);
            const auto first = monitor_command(cfg, data, kQuiet);
            REQUIRE(first.tau);
            const long detection_row = first.training_last_row + *first.tau;
            const auto second = remonitor_command(cfg, data, detection_row + 10, detection_row, kQuiet);
            CHECK(second.warnings.empty());
            if (second.tau && second.training_last_row + *second.tau > 450) ++found;
        }
        CHECK(found >= 49);
    }
    SUBCASE("change-free tail is censored with frequency near 1 - alpha") {
        // Raw boundary: the corrected one is conservative on this small design.
        int censored = 0;
        const int reps = 2000;
        for (int seed = 1; seed <= reps; ++seed) {
            const auto data = synthetic(3600, {150}, 1.0, static_cast<std::uint64_t>(seed));
            auto cfg = base_config(300);
            cfg.gamma = 0.25;
            cfg.corrected = false;
            cfg.max_steps = 3000;
            const auto r = remonitor_command(cfg, data, 301, 200, kQuiet);
            if (r.censored) ++censored;
        }
        CHECK(std::fabs(static_cast<double>(censored) / reps - 0.95) <= 0.02);
    }
    SUBCASE("overlapping window warns") {
        const auto data = synthetic(500, {250}, 1.0, 4);
        const auto r = remonitor_command(base_config(100), data, 100, 300, kQuiet);
        REQUIRE_FALSE(r.warnings.empty());
        CHECK(r.warnings.front().find("overlap") != std::string::npos);
    }
}

TEST_CASE("command-line exit codes") {
    const char* cli = std::getenv("SEQMON_CLI");
    if (!cli) return;
    const auto dir = scratch_dir();
    auto run = [&](const std::string& args) {
        const int status = std::system((std::string(cli) + " " + args + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    CHECK(run("critvals --gamma 0 --alpha 0.05") == 0);
    CHECK(run("critvals --gamma 0.3 --alpha 0.05") == 2);
    CHECK(run("no-such-command") == 2);

    write_file(dir / "ok.csv", "date,y\n1,1\n2,2\n3,0\n4,5\n");
    write_file(dir / "bad.toml", "[data]\nresponse = { column = \"y\" }\n[training]\nM = 2\n");
    CHECK(run("monitor --config " + (dir / "bad.toml").string() + " --data " + (dir / "ok.csv").string()) == 2);
    write_file(dir / "log.toml", "[data]\nresponse = { column = \"y\", transform = \"diff_log\" }\n"
                                 "[training]\nM = 3\n[monitor]\ngamma = 0.0\nalpha = 0.05\n[output]\ndir = \"" +
                                     (dir / "o").string() + "\"\n");
    CHECK(run("monitor --config " + (dir / "log.toml").string() + " --data " + (dir / "ok.csv").string()) == 3);
    CHECK(run("kpss " + (dir / "ok.csv").string() + " --column y") == 2);
}
