#pragma once

#include "seqmon/dgp.hpp"

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace seqmon {

// Stationary alternative ----------------------------------------------------

struct ChangeMagnitude {
    double delta = 0.0;       // c_A' (beta0 - delta_M)
    std::vector<double> c_A;  // (1, E x_2, ..., E x_{d-1}, E y_A)
    double ey_A = 0.0;
};

/// beta0 and delta_M are full d-vectors (intercept, regressors, lag);
/// exog_means holds E x_2..E x_{d-1}. Requires |delta_M[d-1]| < 1.
ChangeMagnitude delta_measure(std::span<const double> beta0, std::span<const double> delta_M,
                              std::span<const double> exog_means);

struct CenterScale {
    double center = 0.0;
    double scale = 0.0;
};

/// (a_M, b_M) with a_M = (c sigma M^{1/2-gamma} / |Delta|)^{1/(1-gamma)} and
/// b_M = sigma a_M^{1/2} / ((1-gamma) |Delta|).
CenterScale am_bm(double delta, long M, double c, double sigma, double gamma);

/// The same scale written as a_M^gamma / (1-gamma) times
/// (c^{1/2-gamma} sigma^{3/2-2gamma} M^{(1/2-gamma)^2} / |Delta|^{3/2-2gamma})^{1/(1-gamma)}.
double bm_alternate_form(double delta, long M, double c, double sigma, double gamma);

// Random-walk alternative ---------------------------------------------------

struct RandomWalkParams {
    double fa1 = 0.0;     // E w_0' (delta_bar - beta0_bar)
    double fb1_sq = 0.0;  // sigma^2 + long-run variance of w' delta_bar
    double fb1() const;
};

struct AnalyticEstimation {};
struct LongSimulation {
    long n = 200'000;
    std::uint64_t seed = 1;
};
using FbEstimation = std::variant<AnalyticEstimation, LongSimulation>;

/// delta_bar and beta0_bar are (intercept, x_2..x_{d-1}) vectors. Regressors of
/// the built-in processes have mean zero, so fa1 is the intercept difference.
/// Analytic mode covers AR(1) regressors (independent or common innovations)
/// and independent GARCH regressors; common-innovation GARCH needs simulation.
RandomWalkParams fa1_fb1(std::span<const double> delta_bar, std::span<const double> beta0_bar,
                         const RegressorProcess& regressors, double sigma_sq, const FbEstimation& estimation);

/// Centering and scale of tau_M under a unit-root change, derived from the
/// expansion of the crossing time:
///   c_M = (2 c sigma / ((1 - beta0_d) |fa1|))^{1/(2-gamma)} M^{(1-2gamma)/(4-2gamma)}
///   d_M = c_M^{gamma-1} P_1 M^{1/2-gamma} fb1 (1 - beta0_d) / ((2-gamma) sqrt(3) sigma)
/// with P_1 = c^{(3-2g)/(4-2g)} sigma^{(7-4g)/(4-2g)} (fc1 |fa1|)^{-(7-4g)/(4-2g)} M^{-(1/2-g)/(4-2g)},
/// fc1 = (1 - beta0_d)/2.
CenterScale cm_dm(double fa1, double fb1, long M, double c, double sigma, double gamma, double beta0_d);

/// Alternative closed forms, kept for comparison:
/// fa1 enters c_M with exponent +1/(2-gamma), d_M carries c_M^{1-gamma} and
/// c^{(3-gamma)/(4-2gamma)}. They do not centre tau_M.
CenterScale cm_dm_printed(double fa1, double fb1, long M, double c, double sigma, double gamma, double beta0_d);

struct RwLimitParams {
    double x = 1.0;
    double gamma = 0.0;
    double beta0_d = 0.0;
    double fb1 = 1.0;
    double fa1_bar = 0.0;
    double c = 1.0;
    double sigma = 1.0;
    long reps = 10'000;
    int grid_per_unit = 10'000;
    std::uint64_t seed = 1;
};

/// Samples of max_{0<s<=x} (1 - beta0_d) s^{-gamma} |fb1 int_0^s W + fa1_bar s^2/2|,
/// with W on a uniform grid of ceil(x * grid_per_unit) steps and the integral
/// by the trapezoid rule. Replication r uses Rng(seed, r).
std::vector<double> rw_functional_samples(const RwLimitParams& p);

/// Exceedance frequency P{functional > c sigma}, the limit of
/// P{tau_M <= x M^{(1-2gamma)/(3-2gamma)}}.
double simulate_rw_limit(const RwLimitParams& p);

/// Samples of int_0^x W(u) du by the trapezoid rule on ceil(x * grid_per_unit) steps.
std::vector<double> integrated_wiener_terminal(double x, long reps, int grid_per_unit, std::uint64_t seed);

// Explosive alternative -----------------------------------------------------

struct ExplosiveParams {
    double delta_d_bar = 1.1;
    double beta0_d = 0.0;
    long s_star = 1;
};

struct ExplosiveThreshold {
    double location = 0.0;      // s* + x + ((1/2-gamma) log M + gamma log log M) / log|delta_d_bar|
    double cdf_argument = 0.0;  // |delta_d_bar|^{-x} c sigma |delta_d_bar - 1| / |delta_d_bar - beta0_d|
};

ExplosiveThreshold explosive_threshold(const ExplosiveParams& params, long M, double gamma, double x, double c,
                                       double sigma);

}  // namespace seqmon
