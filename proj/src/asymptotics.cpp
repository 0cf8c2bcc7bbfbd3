#include "seqmon/asymptotics.hpp"

#include "seqmon/errors.hpp"
#include "seqmon/parallel.hpp"
#include "seqmon/rng.hpp"
#include "seqmon/stats.hpp"

#include <algorithm>
#include <cmath>

namespace seqmon {

namespace {

void check_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma < 0.5)) throw ParameterError("gamma outside [0, 0.5)");
}

void check_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(what) + " must be positive and finite");
}

}  // namespace

ChangeMagnitude delta_measure(std::span<const double> beta0, std::span<const double> delta_M,
                              std::span<const double> exog_means) {
    const std::size_t d = beta0.size();
    if (d < 2 || delta_M.size() != d || exog_means.size() + 2 != d)
        throw DimensionError("delta_measure needs d-vectors and d-2 regressor means");
    const double ar = delta_M[d - 1];
    if (!(std::abs(ar) < 1.0)) throw ParameterError("delta_measure needs a stationary alternative, |delta_d| < 1");

    ChangeMagnitude out;
    double mean_signal = delta_M[0];
    for (std::size_t k = 0; k < exog_means.size(); ++k) mean_signal += exog_means[k] * delta_M[k + 1];
    out.ey_A = mean_signal / (1.0 - ar);

    out.c_A.reserve(d);
    out.c_A.push_back(1.0);
    out.c_A.insert(out.c_A.end(), exog_means.begin(), exog_means.end());
    out.c_A.push_back(out.ey_A);
    for (std::size_t k = 0; k < d; ++k) out.delta += out.c_A[k] * (beta0[k] - delta_M[k]);
    return out;
}

CenterScale am_bm(double delta, long M, double c, double sigma, double gamma) {
    if (delta == 0.0 || !std::isfinite(delta)) throw ParameterError("a_M is undefined for Delta = 0");
    if (M < 1) throw ParameterError("M must be >= 1");
    check_gamma(gamma);
    check_positive(c, "c");
    check_positive(sigma, "sigma");
    const double ad = std::abs(delta);
    CenterScale out;
    out.center = std::pow(c * sigma * std::pow(static_cast<double>(M), 0.5 - gamma) / ad, 1.0 / (1.0 - gamma));
    out.scale = sigma * std::sqrt(out.center) / ((1.0 - gamma) * ad);
    return out;
}

double bm_alternate_form(double delta, long M, double c, double sigma, double gamma) {
    const double a = am_bm(delta, M, c, sigma, gamma).center;
    const double ad = std::abs(delta);
    const double inner = std::pow(c, 0.5 - gamma) * std::pow(sigma, 1.5 - 2.0 * gamma) *
                         std::pow(static_cast<double>(M), (0.5 - gamma) * (0.5 - gamma)) /
                         std::pow(ad, 1.5 - 2.0 * gamma);
    return std::pow(a, gamma) / (1.0 - gamma) * std::pow(inner, 1.0 / (1.0 - gamma));
}

double RandomWalkParams::fb1() const { return std::sqrt(fb1_sq); }

RandomWalkParams fa1_fb1(std::span<const double> delta_bar, std::span<const double> beta0_bar,
                         const RegressorProcess& regressors, double sigma_sq, const FbEstimation& estimation) {
    regressors.validate();
    const std::size_t k = regressors.dim();
    if (delta_bar.size() != k + 1 || beta0_bar.size() != k + 1)
        throw DimensionError("delta_bar and beta0_bar must hold the intercept plus one entry per regressor");
    if (!(sigma_sq >= 0.0)) throw ParameterError("sigma_sq must be non-negative");

    RandomWalkParams out;
    out.fa1 = delta_bar[0] - beta0_bar[0];  // regressor means are zero
    const auto slope = delta_bar.subspan(1);

    if (const auto* sim = std::get_if<LongSimulation>(&estimation)) {
        if (sim->n < 100) throw ParameterError("long simulation needs n >= 100");
        const Eigen::MatrixXd x = gen_regressors(regressors, sim->n, kDefaultBurnIn, sim->seed);
        std::vector<double> signal(static_cast<std::size_t>(sim->n));
        for (long t = 0; t < sim->n; ++t) {
            double v = 0.0;
            for (std::size_t j = 0; j < k; ++j) v += x(t, static_cast<Eigen::Index>(j)) * slope[j];
            signal[static_cast<std::size_t>(t)] = v;
        }
        const double m = stats::mean(signal);
        for (auto& v : signal) v -= m;
        out.fb1_sq = sigma_sq + stats::bartlett_long_run_variance(
                                    signal, stats::bartlett_auto_bandwidth(signal.size()));
        return out;
    }

    double lrv = 0.0;
    if (const auto* ar = std::get_if<Ar1Regressors>(&regressors.kind)) {
        // Unit-innovation AR(1) has long-run standard deviation 1/(1-rho).
        if (regressors.shared_innovations) {
            double s = 0.0;
            for (std::size_t j = 0; j < k; ++j) s += slope[j] / (1.0 - ar->rho[j]);
            lrv = s * s;
        } else {
            for (std::size_t j = 0; j < k; ++j) lrv += std::pow(slope[j] / (1.0 - ar->rho[j]), 2);
        }
    } else {
        if (regressors.shared_innovations)
            throw ParameterError("common-innovation GARCH regressors have no closed-form long-run variance; "
                                 "use long-simulation estimation");
        // GARCH regressors are uncorrelated in time.
        const auto& g = std::get<GarchRegressors>(regressors.kind);
        for (std::size_t j = 0; j < k; ++j) lrv += slope[j] * slope[j] * g.omega[j] / (1.0 - g.phi[j] - g.psi[j]);
    }
    out.fb1_sq = sigma_sq + lrv;
    return out;
}

namespace {

void check_cm_dm(double fa1, double fb1, long M, double c, double sigma, double gamma, double beta0_d) {
    if (fa1 == 0.0 || !std::isfinite(fa1)) throw ParameterError("c_M is undefined for fa1 = 0");
    if (!(fb1 >= 0.0)) throw ParameterError("fb1 must be non-negative");
    if (M < 1) throw ParameterError("M must be >= 1");
    check_gamma(gamma);
    check_positive(c, "c");
    check_positive(sigma, "sigma");
    if (!(beta0_d < 1.0)) throw ParameterError("beta0_d must be < 1");
}

}  // namespace

CenterScale cm_dm(double fa1, double fb1, long M, double c, double sigma, double gamma, double beta0_d) {
    check_cm_dm(fa1, fb1, M, c, sigma, gamma, beta0_d);
    const double a = std::abs(fa1);
    const double m = static_cast<double>(M);
    const double fc1 = (1.0 - beta0_d) / 2.0;
    const double q = 4.0 - 2.0 * gamma;

    CenterScale out;
    out.center = std::pow(c * sigma / (fc1 * a), 1.0 / (2.0 - gamma)) * std::pow(m, (1.0 - 2.0 * gamma) / q);
    const double p1 = std::pow(c, (3.0 - 2.0 * gamma) / q) * std::pow(sigma, (7.0 - 4.0 * gamma) / q) *
                      std::pow(fc1 * a, -(7.0 - 4.0 * gamma) / q) * std::pow(m, -(0.5 - gamma) / q);
    out.scale = std::pow(out.center, gamma - 1.0) * p1 * std::pow(m, 0.5 - gamma) * fb1 * (1.0 - beta0_d) /
                ((2.0 - gamma) * std::sqrt(3.0) * sigma);
    return out;
}

CenterScale cm_dm_printed(double fa1, double fb1, long M, double c, double sigma, double gamma, double beta0_d) {
    check_cm_dm(fa1, fb1, M, c, sigma, gamma, beta0_d);
    const double a = std::abs(fa1);
    const double m = static_cast<double>(M);
    const double q = 4.0 - 2.0 * gamma;

    CenterScale out;
    out.center = std::pow(2.0 * c * sigma / (1.0 - beta0_d), 1.0 / (2.0 - gamma)) * std::pow(a, 1.0 / (2.0 - gamma)) *
                 std::pow(m, (1.0 - 2.0 * gamma) / q);
    const double d0 = 1.0 / (2.0 - gamma) * fb1 / std::sqrt(3.0) *
                      std::pow(sigma / (1.0 - beta0_d), (3.0 - 2.0 * gamma) / q) *
                      std::pow(c, (3.0 - gamma) / q) * std::pow(2.0, (7.0 - 4.0 * gamma) / q);
    out.scale = d0 * std::pow(a, -(7.0 - 4.0 * gamma) / q) *
                std::pow(m, (1.0 - 2.0 * gamma) * (3.0 - 2.0 * gamma) / (2.0 * q)) *
                std::pow(out.center, -(gamma - 1.0));
    return out;
}

namespace {

long grid_steps(double x, int grid_per_unit) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ParameterError("x must be positive");
    if (grid_per_unit < 1) throw ParameterError("grid_per_unit must be >= 1");
    return std::max(1L, static_cast<long>(std::ceil(x * grid_per_unit - 1e-9)));
}

}  // namespace

std::vector<double> rw_functional_samples(const RwLimitParams& p) {
    check_gamma(p.gamma);
    if (!(p.beta0_d < 1.0)) throw ParameterError("beta0_d must be < 1");
    if (!(p.fb1 >= 0.0)) throw ParameterError("fb1 must be non-negative");
    if (p.reps < 1) throw ParameterError("reps must be >= 1");
    const long n = grid_steps(p.x, p.grid_per_unit);
    const double h = p.x / static_cast<double>(n);
    const double sd = std::sqrt(h);
    const double lead = 1.0 - p.beta0_d;

    // Deterministic parts per grid point: s^{-gamma} and fa1_bar s^2 / 2.
    std::vector<double> weight(static_cast<std::size_t>(n));
    std::vector<double> drift(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const double s = static_cast<double>(i + 1) * h;
        weight[static_cast<std::size_t>(i)] = lead * std::pow(s, -p.gamma);
        drift[static_cast<std::size_t>(i)] = p.fa1_bar * s * s / 2.0;
    }

    std::vector<double> out(static_cast<std::size_t>(p.reps));
    parallel_for(out.size(), [&](std::size_t r) {
        Rng rng(p.seed, r);
        double w = 0.0, integral = 0.0, best = 0.0;
        for (long i = 0; i < n; ++i) {
            const double next = w + sd * rng.normal();
            integral += 0.5 * h * (w + next);
            w = next;
            const auto u = static_cast<std::size_t>(i);
            best = std::max(best, weight[u] * std::abs(p.fb1 * integral + drift[u]));
        }
        out[r] = best;
    });
    return out;
}

double simulate_rw_limit(const RwLimitParams& p) {
    check_positive(p.c, "c");
    check_positive(p.sigma, "sigma");
    const auto samples = rw_functional_samples(p);
    const double level = p.c * p.sigma;
    const auto hits = std::count_if(samples.begin(), samples.end(), [&](double v) { return v > level; });
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

std::vector<double> integrated_wiener_terminal(double x, long reps, int grid_per_unit, std::uint64_t seed) {
    if (reps < 1) throw ParameterError("reps must be >= 1");
    const long n = grid_steps(x, grid_per_unit);
    const double h = x / static_cast<double>(n);
    const double sd = std::sqrt(h);
    std::vector<double> out(static_cast<std::size_t>(reps));
    parallel_for(out.size(), [&](std::size_t r) {
        Rng rng(seed, r);
        double w = 0.0, integral = 0.0;
        for (long i = 0; i < n; ++i) {
            const double next = w + sd * rng.normal();
            integral += 0.5 * h * (w + next);
            w = next;
        }
        out[r] = integral;
    });
    return out;
}

ExplosiveThreshold explosive_threshold(const ExplosiveParams& params, long M, double gamma, double x, double c,
                                       double sigma) {
    const double dd = params.delta_d_bar;
    if (!(std::abs(dd) > 1.0) || !std::isfinite(dd)) throw ParameterError("explosive case needs |delta_d_bar| > 1");
    if (M < 3) throw ParameterError("explosive threshold needs M >= 3 (log log M)");
    check_gamma(gamma);
    check_positive(c, "c");
    check_positive(sigma, "sigma");
    const double m = static_cast<double>(M);
    const double log_d = std::log(std::abs(dd));
    ExplosiveThreshold out;
    out.location = static_cast<double>(params.s_star) + x +
                   ((0.5 - gamma) * std::log(m) + gamma * std::log(std::log(m))) / log_d;
    out.cdf_argument = std::pow(std::abs(dd), -x) * c * sigma * std::abs(dd - 1.0) / std::abs(dd - params.beta0_d);
    return out;
}

}  // namespace seqmon
