#pragma once

#include <span>
#include <vector>

namespace seqmon::stats {

double mean(std::span<const double> x);
/// Sample variance with divisor n - 1.
double variance(std::span<const double> x);

double normal_cdf(double x);

/// Linear-interpolation quantile (Hyndman-Fan type 7) of an ascending sample.
double quantile_sorted(std::span<const double> sorted, double p);

/// Distribution-free standard error of the p-quantile from the order
/// statistics bracketing a 95% binomial interval around rank n*p.
double quantile_std_error_sorted(std::span<const double> sorted, double p);

/// sup_x |F_n(x) - Phi(x)|.
double ks_distance_normal(std::span<const double> sample);

/// sup_x |F_n(x) - G_m(x)| between two empirical distributions.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Conventional bandwidth floor(4 (n/100)^{1/4}).
int bartlett_auto_bandwidth(std::size_t n);

/// Bartlett-kernel long-run variance of an already-centered series:
/// (1/n) sum e_t^2 + (2/n) sum_{j=1}^{b} (1 - j/(b+1)) sum_t e_t e_{t-j}.
double bartlett_long_run_variance(std::span<const double> centered, int bandwidth);

/// Gaussian kernel density estimate with Silverman's rule-of-thumb bandwidth,
/// evaluated at the given points.
std::vector<double> kernel_density(std::span<const double> sample, std::span<const double> at);

}  // namespace seqmon::stats
