#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <seqmon/asymptotics.hpp>
#include <seqmon/boundary.hpp>
#include <seqmon/critical_values.hpp>
#include <seqmon/dgp.hpp>
#include <seqmon/errors.hpp>
#include <seqmon/experiments.hpp>
#include <seqmon/model.hpp>
#include <seqmon/monitor.hpp>
#include <seqmon/stationarity.hpp>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace seqmon;
using namespace py::literals;

namespace {

// Training uses y[0..M] with y[0] as the lag of the first row.
TrainingSample training(const std::vector<double>& y, const Eigen::MatrixXd& exog, long M) {
    if (M < 1 || static_cast<long>(y.size()) < M + 1) throw ParameterError("need at least M + 1 observations");
    if (exog.rows() != static_cast<long>(y.size())) throw DimensionError("exog must have one row per observation");
    const std::vector<double> train(y.begin(), y.begin() + M + 1);
    return TrainingSample::with_warmup(train, exog.topRows(M + 1));
}

Eigen::MatrixXd exog_or_empty(const std::optional<Eigen::MatrixXd>& exog, std::size_t n) {
    return exog ? *exog : Eigen::MatrixXd(static_cast<long>(n), 0);
}

py::object parse_json(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

ExperimentPlan make_plan(const std::vector<std::string>& dgps, std::vector<long> Ms, std::vector<double> gammas,
                         std::vector<double> alphas, long reps, long horizon_multiple, std::uint64_t seed,
                         bool corrected, std::optional<double> c) {
    ExperimentPlan plan;
    for (const auto& d : dgps) plan.dgps.push_back(parse_dgp_id(d));
    plan.Ms = std::move(Ms);
    plan.gammas = std::move(gammas);
    plan.alphas = std::move(alphas);
    plan.reps = reps;
    plan.horizon_multiple = horizon_multiple;
    plan.master_seed = seed;
    plan.corrected = corrected;
    plan.c_override = c;
    return plan;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sequential change-point monitoring core";

    static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<SingularMatrixError>(m, "SingularMatrixError", base.ptr());
    py::register_exception<DegenerateVarianceError>(m, "DegenerateVarianceError", base.ptr());
    py::register_exception<StateError>(m, "StateError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());

    m.def("table_critical_value", &table_critical_value, "gamma"_a, "alpha"_a);

    m.def(
        "critical_value",
        [](double gamma, double alpha, bool simulate, int grid_size, long reps, std::uint64_t seed) {
            const CriticalValueSource src =
                simulate ? CriticalValueSource{SimulationSource{grid_size, reps, seed}} : CriticalValueSource{TableSource{}};
            const auto cv = critical_value(gamma, alpha, src);
            return py::dict("value"_a = cv.value, "simulated"_a = cv.simulated, "std_error"_a = cv.std_error,
                            "bias_warning"_a = cv.bias_warning, "provenance"_a = cv.provenance);
        },
        "gamma"_a, "alpha"_a, py::kw_only(), "simulate"_a = false, "grid_size"_a = 10'000, "reps"_a = 50'000,
        "seed"_a = SimulationSource{}.seed);

    m.def(
        "boundary",
        [](long long M, long long s, double c, double gamma, bool corrected, std::optional<double> sigma_hat) {
            return boundary_value(M, s, BoundaryParams{c, gamma, corrected, sigma_hat});
        },
        "M"_a, "s"_a, "c"_a, "gamma"_a, py::kw_only(), "corrected"_a = false, "sigma_hat"_a = py::none());

    m.def(
        "fit_ols",
        [](const std::vector<double>& y, std::optional<Eigen::MatrixXd> exog, long M) {
            const auto fit = fit_ols(training(y, exog_or_empty(exog, y.size()), M));
            return py::dict("beta_hat"_a = Eigen::VectorXd(fit.beta_hat()), "sigma_hat"_a = fit.sigma_hat(),
                            "residuals"_a = Eigen::VectorXd(fit.residuals()));
        },
        "y"_a, "exog"_a = py::none(), py::kw_only(), "M"_a,
        "Fits on y[1..M] with y[0] as the first lag; exog has one row per entry of y.");

    m.def(
        "monitor",
        [](const std::vector<double>& y, std::optional<Eigen::MatrixXd> exog, long M, double gamma, double alpha,
           std::optional<double> c, bool corrected, std::optional<long> closed_end_N, long max_steps,
           bool trajectory) {
            const Eigen::MatrixXd X = exog_or_empty(exog, y.size());
            const auto fit = fit_ols(training(y, X, M));
            const double cval = c ? *c : table_critical_value(gamma, alpha);
            MonitorConfig cfg{.boundary = {.c = cval, .gamma = gamma, .corrected = corrected}, .M = M};
            if (closed_end_N) cfg.horizon = ClosedEnd{*closed_end_N};
            else cfg.horizon = OpenEnded{max_steps};
            const long T = static_cast<long>(y.size()) - 1;
            const std::span<const double> ys(y);
            const auto r = run_stream(fit, cfg, y[static_cast<std::size_t>(M)], X.bottomRows(T - M), ys.subspan(M + 1),
                                      trajectory);
            py::dict out("stopped"_a = r.stopped, "value"_a = r.value, "c"_a = cval, "sigma_hat"_a = fit.sigma_hat(),
                         "beta_hat"_a = Eigen::VectorXd(fit.beta_hat()));
            out["tau"] = r.stopped ? py::object(py::int_(r.value)) : py::object(py::none());
            if (r.trajectory) {
                py::list pts;
                for (const auto& p : *r.trajectory)
                    pts.append(py::make_tuple(p.s, p.detector, p.boundary, to_string(p.decision)));
                out["trajectory"] = pts;
            }
            return out;
        },
        "y"_a, "exog"_a = py::none(), py::kw_only(), "M"_a, "gamma"_a = 0.0, "alpha"_a = 0.05, "c"_a = py::none(),
        "corrected"_a = true, "closed_end_N"_a = py::none(), "max_steps"_a = kDefaultMaxSteps, "trajectory"_a = false,
        "Fits on the first M + 1 entries and monitors the rest. tau is None when censored.");

    m.def(
        "simulate",
        [](const std::string& dgp, long M, long s_star, std::optional<double> delta_d, std::uint64_t seed,
           std::uint64_t replication, std::optional<long> extra_horizon) {
            auto spec = make_dgp(parse_dgp_id(dgp), M, s_star, delta_d, seed);
            if (extra_horizon) spec.extra_horizon = *extra_horizon;
            const auto s = seqmon::simulate(spec, replication);
            return py::dict("y"_a = s.y, "exog"_a = s.exog, "eps"_a = s.eps, "change_index"_a = s.change_index);
        },
        "dgp"_a, "M"_a, py::kw_only(), "s_star"_a = 1, "delta_d"_a = py::none(), "seed"_a = 0, "replication"_a = 0,
        "extra_horizon"_a = py::none());

    m.def(
        "size_study",
        [](const std::vector<std::string>& dgps, std::vector<long> Ms, std::vector<double> gammas,
           std::vector<double> alphas, long reps, long horizon_multiple, std::uint64_t seed, bool corrected,
           std::optional<double> c) {
            const auto plan = make_plan(dgps, std::move(Ms), std::move(gammas), std::move(alphas), reps,
                                        horizon_multiple, seed, corrected, c);
            std::string json;
            {
                py::gil_scoped_release release;
                json = run_size_study(plan).to_json();
            }
            return parse_json(json);
        },
        "dgps"_a, py::kw_only(), "Ms"_a, "gammas"_a, "alphas"_a, "reps"_a = 10'000, "horizon_multiple"_a = 10,
        "seed"_a = ExperimentPlan{}.master_seed, "corrected"_a = true, "c"_a = py::none());

    m.def(
        "power_study",
        [](const std::vector<std::string>& dgps, std::vector<long> Ms, std::vector<double> gammas,
           std::vector<double> alphas, std::vector<long> s_stars, std::vector<double> delta_ds, long reps,
           long horizon_multiple, std::uint64_t seed, bool corrected, std::optional<double> c) {
            auto plan = make_plan(dgps, std::move(Ms), std::move(gammas), std::move(alphas), reps, horizon_multiple,
                                  seed, corrected, c);
            plan.s_stars = std::move(s_stars);
            plan.delta_ds = std::move(delta_ds);
            std::string json;
            {
                py::gil_scoped_release release;
                json = run_power_study(plan).to_json();
            }
            return parse_json(json);
        },
        "dgps"_a, py::kw_only(), "Ms"_a, "gammas"_a, "alphas"_a, "s_stars"_a = std::vector<long>{1},
        "delta_ds"_a = std::vector<double>{}, "reps"_a = 10'000, "horizon_multiple"_a = 10,
        "seed"_a = ExperimentPlan{}.master_seed, "corrected"_a = true, "c"_a = py::none());

    m.def(
        "kpss",
        [](const std::vector<double>& x, std::optional<int> bandwidth) {
            const auto r = kpss_level(x, bandwidth);
            return py::dict("statistic"_a = r.statistic, "bandwidth"_a = r.bandwidth, "reject_10"_a = r.reject_10,
                            "reject_5"_a = r.reject_5, "reject_1"_a = r.reject_1, "degenerate"_a = r.degenerate);
        },
        "x"_a, "bandwidth"_a = py::none());

    m.def(
        "am_bm",
        [](double delta, long M, double c, double sigma, double gamma) {
            const auto r = am_bm(delta, M, c, sigma, gamma);
            return py::make_tuple(r.center, r.scale);
        },
        "delta"_a, "M"_a, "c"_a, "sigma"_a, "gamma"_a);

    m.def(
        "cm_dm",
        [](double fa1, double fb1, long M, double c, double sigma, double gamma, double beta0_d) {
            const auto r = cm_dm(fa1, fb1, M, c, sigma, gamma, beta0_d);
            return py::make_tuple(r.center, r.scale);
        },
        "fa1"_a, "fb1"_a, "M"_a, "c"_a, "sigma"_a, "gamma"_a, "beta0_d"_a);
}
