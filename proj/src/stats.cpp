#include "seqmon/stats.hpp"

#include "seqmon/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace seqmon::stats {

double mean(std::span<const double> x) {
    if (x.empty()) throw ParameterError("mean of an empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) throw ParameterError("variance needs at least two values");
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw ParameterError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("quantile probability outside [0, 1]");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile_std_error_sorted(std::span<const double> sorted, double p) {
    const auto n = static_cast<double>(sorted.size());
    if (sorted.size() < 2) return 0.0;
    const double half_width = 1.96 * std::sqrt(n * p * (1.0 - p));
    const double centre = n * p;
    auto clamp_rank = [&](double r) {
        return static_cast<std::size_t>(std::clamp(r, 0.0, n - 1.0));
    };
    const double upper = sorted[clamp_rank(std::ceil(centre + half_width))];
    const double lower = sorted[clamp_rank(std::floor(centre - half_width))];
    return (upper - lower) / (2.0 * 1.96);
}

double ks_distance_normal(std::span<const double> sample) {
    if (sample.empty()) throw ParameterError("KS distance of an empty sample");
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const auto n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = normal_cdf(x[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ParameterError("KS distance of an empty sample");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const auto n = static_cast<double>(x.size());
    const auto m = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    return d;
}

int bartlett_auto_bandwidth(std::size_t n) {
    return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

double bartlett_long_run_variance(std::span<const double> e, int bandwidth) {
    if (e.empty()) throw ParameterError("long-run variance of an empty series");
    if (bandwidth < 0) throw ParameterError("negative bandwidth");
    const auto n = e.size();
    double total = 0.0;
    for (double v : e) total += v * v;
    const auto max_lag = std::min<std::size_t>(static_cast<std::size_t>(bandwidth), n - 1);
    for (std::size_t j = 1; j <= max_lag; ++j) {
        double acc = 0.0;
        for (std::size_t t = j; t < n; ++t) acc += e[t] * e[t - j];
        total += 2.0 * (1.0 - static_cast<double>(j) / (bandwidth + 1.0)) * acc;
    }
    return total / static_cast<double>(n);
}

std::vector<double> kernel_density(std::span<const double> sample, std::span<const double> at) {
    if (sample.size() < 2) throw ParameterError("kernel density needs at least two values");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double sd = std::sqrt(variance(sorted));
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd > 0.0 ? sd : 1.0;
    const double h = 0.9 * spread * std::pow(static_cast<double>(sorted.size()), -0.2);
    const double norm = 1.0 / (static_cast<double>(sorted.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    std::vector<double> out;
    out.reserve(at.size());
    for (double x : at) {
        double acc = 0.0;
        for (double v : sorted) {
            const double z = (x - v) / h;
            acc += std::exp(-0.5 * z * z);
        }
        out.push_back(acc * norm);
    }
    return out;
}

}  // namespace seqmon::stats
