// End-to-end acceptance checks. Each criterion prints exactly one PASS/FAIL
// line; indented lines underneath are informational. Tolerances are fixed here
// and never derived from the data being checked.

#include "oracles.hpp"

#include <seqmon/asymptotics.hpp>
#include <seqmon/critical_values.hpp>
#include <seqmon/dgp.hpp>
#include <seqmon/experiments.hpp>
#include <seqmon/model.hpp>
#include <seqmon/monitor.hpp>
#include <seqmon/rng.hpp>
#include <seqmon/stationarity.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

using namespace seqmon;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    std::vector<std::string> info;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

constexpr std::uint64_t kSeed = 20240601;

// 1 -----------------------------------------------------------------------------

constexpr double kTableTol = 0.03;
constexpr double kTableTolEdge = 0.05;  // gamma = .49, where the grid bias is largest

const std::vector<WienerSupSample>& shared_paths() {
    static const auto samples = [] {
        const std::vector<double> gammas(CriticalValueTable::gammas.begin(), CriticalValueTable::gammas.end());
        return simulate_sup_wiener_multi(gammas, 1.0, 10'000, 50'000, kSeed);
    }();
    return samples;
}

Outcome critical_value_table() {
    const auto& samples = shared_paths();
    Outcome out{true, {}, {}};
    double worst = 0.0;
    for (std::size_t g = 0; g < CriticalValueTable::gammas.size(); ++g) {
        const double gamma = CriticalValueTable::gammas[g];
        const double tol = gamma == 0.49 ? kTableTolEdge : kTableTol;
        std::string row = fmt("gamma %.2f:", gamma);
        for (std::size_t a = 0; a < CriticalValueTable::alphas.size(); ++a) {
            const double alpha = CriticalValueTable::alphas[a];
            const double sim = samples[g].quantile(1.0 - alpha);
            const double dev = sim - CriticalValueTable::values[g][a];
            worst = std::max(worst, std::fabs(dev) / tol);
            if (std::fabs(dev) > tol) out.pass = false;
            row += fmt(" %.4f(%+.4f)", sim, dev);
        }
        out.info.push_back(row);
    }
    out.detail = fmt("30 entries, grid 10000, 50000 reps; worst |dev|/tol = %.3f", worst);
    return out;
}

// 2 -----------------------------------------------------------------------------

Outcome reflection_series() {
    constexpr double tol = 0.03;
    const double sim = shared_paths().front().quantile(0.95);
    const double exact = oracle::sup_abs_wiener_quantile(0.95);
    return {std::fabs(sim - exact) <= tol, fmt("simulated %.4f vs series %.4f (tol %.2f)", sim, exact, tol), {}};
}

// 3 -----------------------------------------------------------------------------

ExperimentPlan power_plan(DgpId id, std::vector<long> Ms, std::vector<long> s_stars, std::vector<double> gammas,
                          std::vector<double> alphas, std::vector<double> delta_ds = {}) {
    ExperimentPlan plan;
    plan.dgps = {id};
    plan.Ms = std::move(Ms);
    plan.s_stars = std::move(s_stars);
    plan.gammas = std::move(gammas);
    plan.alphas = std::move(alphas);
    plan.delta_ds = std::move(delta_ds);
    plan.reps = 10'000;
    plan.master_seed = kSeed;
    return plan;
}

Outcome power_cells() {
    Outcome out{true, {}, {}};

    const auto v = run_power_study(power_plan(DgpId::V, {100}, {1}, {0.45}, {0.05})).cells.front();
    const bool v_ok = std::fabs(v.rate_percent - 99.47) <= 1.0;
    out.info.push_back(fmt("v M=100 s*=1 g=.45 a=.05: %.2f%% (target 99.47 +- 1.0) %s", v.rate_percent,
                           v_ok ? "ok" : "off"));

    // Power counted within M monitoring steps; the 10M horizon is reported alongside.
    auto vii_plan = power_plan(DgpId::VII, {50}, {1}, {0.0}, {0.10}, {0.90});
    vii_plan.horizon_multiple = 1;
    const auto vii = run_power_study(vii_plan).cells.front();
    const bool vii_ok = std::fabs(vii.rate_percent - 73.61) <= 2.0;
    out.info.push_back(fmt("vii d=.90 M=50 s*=1 g=0 a=.10, horizon M: %.2f%% (target 73.61 +- 2.0) %s",
                           vii.rate_percent, vii_ok ? "ok" : "off"));
    vii_plan.horizon_multiple = 10;
    out.info.push_back(fmt("  same cell, horizon 10M: %.2f%%", run_power_study(vii_plan).cells.front().rate_percent));

    const std::vector<double> gammas{0.0, 0.25, 0.45, 0.49}, alphas{0.10, 0.05, 0.01};
    double lowest = 100.0;
    long cells = 0;
    for (const auto& [Ms, s] : {std::pair{std::vector<long>{50, 100}, 1L}, std::pair{std::vector<long>{100, 150}, 5L}}) {
        for (const auto& c : run_power_study(power_plan(DgpId::XI, Ms, {s}, gammas, alphas, {1.25})).cells) {
            lowest = std::min(lowest, c.rate_percent);
            ++cells;
        }
    }
    const bool xi_ok = cells == 48 && lowest >= 99.9;
    out.info.push_back(fmt("xi d=1.25: %ld cells, lowest %.2f%% (need >= 99.9) %s", cells, lowest, xi_ok ? "ok" : "off"));

    out.pass = v_ok && vii_ok && xi_ok;
    out.detail = fmt("v %.2f, vii %.2f, xi min %.2f over %ld cells", v.rate_percent, vii.rate_percent, lowest, cells);
    return out;
}

// 4 -----------------------------------------------------------------------------

Outcome size_band() {
    constexpr double band = 2.0;
    ExperimentPlan plan;
    plan.dgps = {DgpId::I, DgpId::II, DgpId::III, DgpId::IV};
    plan.Ms = {300};
    plan.gammas = {0.25};
    plan.alphas = {0.05};
    plan.reps = 10'000;
    plan.master_seed = kSeed;
    Outcome out{true, {}, {}};
    for (const auto& c : run_size_study(plan).cells) {
        if (std::fabs(c.rate_percent - 5.0) > band) out.pass = false;
        out.detail += fmt("%s %.2f%% ", c.dgp.c_str(), c.rate_percent);
    }
    out.detail += fmt("(band 5 +- %.0f pp)", band);
    return out;
}

// 5 -----------------------------------------------------------------------------

std::vector<double> standardized(const std::vector<long>& taus, CenterScale cs) {
    std::vector<double> z;
    z.reserve(taus.size());
    for (long t : taus) z.push_back((static_cast<double>(t) - cs.center) / cs.scale);
    return z;
}

Outcome stopping_time_normality() {
    constexpr double tol_stationary = 0.10, tol_unit_root = 0.15;
    constexpr long M = 5000, reps = 2000;

    // Intercept shift of .5 with the lag coefficient kept: Delta = .5, so
    // Delta sqrt(M) = 35. Raw boundary, whose crossing time the centering describes.
    DgpSpec stat = make_dgp(DgpId::V, M, 1, std::nullopt, kSeed);
    stat.change->delta_bar = dgp_params::kBeta0Bar;
    stat.change->delta_bar[0] += 0.5;
    stat.change->delta_d = dgp_params::kBeta0d;
    const double c45 = table_critical_value(0.45, 0.05);
    const auto d1 = tau_density({.spec = stat, .setting = {0.45, c45, false}, .reps = reps, .horizon = M});
    const auto ab = am_bm(0.5, M, c45, 1.0, 0.45);
    const double ks1 = d1.taus.size() == static_cast<std::size_t>(reps) ? oracle::ks_normal(standardized(d1.taus, ab)) : 1.0;

    // Unit-root change with a1 = .5 (intercept 0 -> .5, lag coefficient -> 1).
    DgpSpec ur = make_dgp(DgpId::V, M, 1, std::nullopt, kSeed);
    ur.beta0_bar[0] = 0.0;
    ur.change->delta_bar = ur.beta0_bar;
    ur.change->delta_bar[0] = 0.5;
    ur.change->delta_d = 1.0;
    const double c0 = table_critical_value(0.0, 0.05);
    const auto d2 = tau_density({.spec = ur, .setting = {0.0, c0, false}, .reps = reps, .horizon = M});
    const auto rw = fa1_fb1(ur.change->delta_bar, ur.beta0_bar, ur.regressors, 1.0, AnalyticEstimation{});
    const auto cd = cm_dm(rw.fa1, rw.fb1(), M, c0, 1.0, 0.0, ur.beta0_d);
    const double ks2 = d2.taus.size() == static_cast<std::size_t>(reps) ? oracle::ks_normal(standardized(d2.taus, cd)) : 1.0;

    return {ks1 < tol_stationary && ks2 < tol_unit_root,
            fmt("stationary KS %.4f (< %.2f, a_M %.1f b_M %.1f), unit root KS %.4f (< %.2f, c_M %.1f d_M %.2f)", ks1,
                tol_stationary, ab.center, ab.scale, ks2, tol_unit_root, cd.center, cd.scale),
            {fmt("censored: %.4f / %.4f", d1.censored_fraction, d2.censored_fraction)}};
}

// 6 -----------------------------------------------------------------------------

Outcome integrated_wiener() {
    constexpr double tol = 0.02;
    Outcome out{true, {}, {}};
    for (double x : {0.5, 1.0, 2.0}) {
        const auto v = integrated_wiener_terminal(x, 100'000, 1000, kSeed);
        const double rel = oracle::variance(v) / (x * x * x / 3.0) - 1.0;
        if (std::fabs(rel) > tol) out.pass = false;
        out.detail += fmt("x=%.1f rel %+.4f; ", x, rel);
    }
    out.detail += fmt("tol %.2f", tol);
    return out;
}

// 7 -----------------------------------------------------------------------------

Outcome functional_scaling() {
    constexpr double tol = 0.02;
    constexpr double x = 2.0;
    Outcome out{true, {}, {}};
    for (double gamma : {0.0, 0.25, 0.45}) {
        RwLimitParams p{.x = 1.0, .gamma = gamma, .beta0_d = 0.25, .fb1 = 1.0, .fa1_bar = 0.0,
                        .reps = 20'000, .grid_per_unit = 10'000, .seed = kSeed};
        auto unit = rw_functional_samples(p);
        const double scale = std::pow(x, 1.5 - gamma);
        for (double& u : unit) u *= scale;
        p.x = x;
        p.seed = kSeed + 1;
        const double ks = oracle::ks_two_sample(rw_functional_samples(p), unit);
        if (ks >= tol) out.pass = false;
        out.detail += fmt("gamma %.2f KS %.4f; ", gamma, ks);
    }
    out.detail += fmt("x = %.0f, tol %.2f", x, tol);
    return out;
}

// 8 and 9 share the residual-orthogonality check ---------------------------------

/// max_j |X_j' e| / (||X_j|| ||e||), the cosine between residuals and each column.
double orthogonality(const Eigen::MatrixXd& X, const Eigen::VectorXd& e) {
    double worst = 0.0;
    const double en = e.norm();
    if (en == 0.0) return 0.0;
    for (long j = 0; j < X.cols(); ++j) {
        const double xn = X.col(j).norm();
        if (xn > 0.0) worst = std::max(worst, std::fabs(X.col(j).dot(e)) / (xn * en));
    }
    return worst;
}

constexpr double kOrthogonalityTol = 1e-10;

Outcome online_vs_batch() {
    constexpr long replications = 1000;
    const std::vector<long> Ms{50, 100, 150, 300};
    const std::vector<double> unit_root{0.90, 0.95, 0.99, 1.00}, explosive{1.01, 1.05, 1.10, 1.25};
    long mismatches = 0, stops = 0;
    double worst_orth = 0.0;
    for (long r = 0; r < replications; ++r) {
        Rng rng(kSeed, static_cast<std::uint64_t>(r));
        auto pick = [&](std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(rng.uniform() * n)); };
        const auto id = static_cast<DgpId>(1 + r % 12);
        const long M = Ms[pick(Ms.size())];
        const double gamma = CriticalValueTable::gammas[pick(CriticalValueTable::gammas.size())];
        const double alpha = CriticalValueTable::alphas[pick(CriticalValueTable::alphas.size())];
        const bool corrected = rng.uniform() < 0.5;
        const long s_star = 1 + static_cast<long>(pick(10));
        std::optional<double> delta_d;
        const int n = static_cast<int>(id);
        if (n >= 7 && n <= 10) delta_d = unit_root[pick(4)];
        if (n >= 11) delta_d = explosive[pick(4)];
        const auto spec = make_dgp(id, M, s_star, delta_d, kSeed + static_cast<std::uint64_t>(r));
        const auto series = simulate(spec, 0);

        const std::vector<double> train(series.y.begin(), series.y.begin() + M + 1);
        const auto sample = TrainingSample::with_warmup(train, series.exog.topRows(M + 1));
        const auto fit = fit_ols(sample);
        worst_orth = std::max(worst_orth, orthogonality(sample.design(), fit.residuals()));

        const double c = table_critical_value(gamma, alpha);
        const long horizon = 10 * M;
        const long T = static_cast<long>(series.y.size()) - 1;
        const MonitorConfig cfg{.boundary = {.c = c, .gamma = gamma, .corrected = corrected},
                                .horizon = OpenEnded{horizon}, .M = M};
        const std::span<const double> y(series.y);
        const auto online = run_stream(fit, cfg, series.y[M], series.exog.bottomRows(T - M), y.subspan(M + 1));

        std::vector<std::vector<double>> rows;
        std::vector<double> ys;
        for (long t = M + 1; t <= T; ++t) {
            std::vector<double> row{1.0};
            for (long j = 0; j < series.exog.cols(); ++j) row.push_back(series.exog(t, j));
            row.push_back(series.y[t - 1]);
            rows.push_back(std::move(row));
            ys.push_back(series.y[t]);
        }
        const std::vector<double> beta(fit.beta_hat().data(), fit.beta_hat().data() + fit.d());
        const auto batch = oracle::batch_scan(beta, fit.sigma_hat(), M, rows, ys, c, gamma, corrected, horizon);

        const bool same = batch.tau ? (online.stopped && online.value == *batch.tau)
                                    : (!online.stopped && online.value == batch.steps);
        if (!same) ++mismatches;
        if (online.stopped) ++stops;
    }
    return {mismatches == 0 && worst_orth < kOrthogonalityTol,
            fmt("%ld replications over all 12 designs: %ld mismatches, %ld stopped; max residual cosine %.2e", replications,
                mismatches, stops, worst_orth),
            {}};
}

Outcome ols_oracle() {
    constexpr double tol = 1e-8;
    constexpr int instances = 100;
    double worst = 0.0, worst_orth = 0.0;
    for (int k = 0; k < instances; ++k) {
        Rng rng(kSeed + 9, static_cast<std::uint64_t>(k));
        const long d = 2 + static_cast<long>(rng.uniform() * 5);   // 2..6
        const long n = d + 3 + static_cast<long>(rng.uniform() * 40);
        Eigen::MatrixXd X(n, d);
        Eigen::VectorXd y(n);
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
        std::vector<double> ys(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) {
            X(i, 0) = 1.0;
            for (long j = 1; j < d; ++j) X(i, j) = rng.normal() * (1.0 + j);
            y(i) = rng.normal();
            for (long j = 0; j < d; ++j) y(i) += 0.3 * j * X(i, j);
            for (long j = 0; j < d; ++j) rows[static_cast<std::size_t>(i)].push_back(X(i, j));
            ys[static_cast<std::size_t>(i)] = y(i);
        }
        const TrainingSample sample(X, y);
        const auto fit = fit_ols(sample);
        const auto ref = oracle::normal_equations(rows, ys);
        double num = 0.0, den = 0.0;
        for (long j = 0; j < d; ++j) {
            num = std::max(num, std::fabs(fit.beta_hat()(j) - ref[static_cast<std::size_t>(j)]));
            den = std::max(den, std::fabs(ref[static_cast<std::size_t>(j)]));
        }
        worst = std::max(worst, num / den);
        worst_orth = std::max(worst_orth, orthogonality(X, fit.residuals()));
    }
    return {worst <= tol && worst_orth < kOrthogonalityTol,
            fmt("%d instances: max relative error %.2e (tol %.0e), max residual cosine %.2e", instances, worst, tol,
                worst_orth),
            {}};
}

// 10 ----------------------------------------------------------------------------

Outcome garch_moments() {
    constexpr double tol = 0.10;
    constexpr long n = 200'000;
    Outcome out{true, {}, {}};
    double worst = 0.0;
    // The regressor column (.6, .6, .2) has an infinite fourth moment, so its
    // sample variance settles slowly; seed 1 is the pinned draw.
    for (bool shared : {false, true}) {
        const RegressorProcess proc{GarchRegressors{dgp_params::kOmega, dgp_params::kPhi, dgp_params::kPsi}, shared};
        const auto x = gen_regressors(proc, n, kDefaultBurnIn, 1);
        for (long k = 0; k < x.cols(); ++k) {
            const std::vector<double> col(x.col(k).data(), x.col(k).data() + n);
            const double target = oracle::garch_variance(dgp_params::kOmega[static_cast<std::size_t>(k)],
                                                         dgp_params::kPhi[static_cast<std::size_t>(k)],
                                                         dgp_params::kPsi[static_cast<std::size_t>(k)]);
            worst = std::max(worst, std::fabs(oracle::variance(col) / target - 1.0));
        }
    }
    const auto& g = dgp_params::kGarchErrors;
    const auto e = gen_errors(ErrorProcess{g}, n, kDefaultBurnIn, 1);
    worst = std::max(worst, std::fabs(oracle::variance(e) / oracle::garch_variance(g.omega, g.phi, g.psi) - 1.0));
    out.pass = worst <= tol;
    out.detail = fmt("4 regressor columns (independent and shared) and the error process: max rel dev %.4f (tol %.2f)",
                     worst, tol);
    return out;
}

// 11 ----------------------------------------------------------------------------

Outcome kpss_checks() {
    constexpr long n = 500, reps = 2000;
    constexpr double lo = 0.02, hi = 0.08;
    const std::vector<double> constant(n, 3.25);
    const auto flat = kpss_level(constant);
    const bool flat_ok = flat.statistic == 0.0 && !flat.reject_10;

    long rejections = 0;
    for (long r = 0; r < reps; ++r) {
        Rng rng(kSeed + 11, static_cast<std::uint64_t>(r));
        std::vector<double> x(n);
        for (double& v : x) v = rng.normal();
        if (kpss_level(x).reject_5) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / reps;

    Rng rng(kSeed + 12);
    std::vector<double> trend(n);
    for (long t = 0; t < n; ++t) trend[static_cast<std::size_t>(t)] = 0.05 * static_cast<double>(t) + rng.normal();
    const auto tr = kpss_level(trend);

    return {flat_ok && rate >= lo && rate <= hi && tr.reject_1,
            fmt("constant -> %.3g; size %.2f%% (band [%.0f%%, %.0f%%]); trend statistic %.3f (1%% value %.3f)",
                flat.statistic, 100.0 * rate, 100.0 * lo, 100.0 * hi, tr.statistic, kKpssCritical1),
            {}};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"critical values reproduce the table", critical_value_table},
        {"gamma = 0 quantile matches the reflection series", reflection_series},
        {"power cells", power_cells},
        {"size of the null designs", size_band},
        {"stopping-time normality", stopping_time_normality},
        {"variance of the integrated Wiener process", integrated_wiener},
        {"scaling of the random-walk functional", functional_scaling},
        {"online monitor equals batch scan", online_vs_batch},
        {"least squares against the normal equations", ols_oracle},
        {"GARCH unconditional variances", garch_moments},
        {"KPSS behaviour", kpss_checks},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what(), {}};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("AC%-2zu %s  %s: %s [%.1fs]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.c_str(), secs);
        for (const auto& line : o.info) std::printf("       %s\n", line.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
