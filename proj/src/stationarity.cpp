#include "seqmon/stationarity.hpp"

#include "seqmon/errors.hpp"
#include "seqmon/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace seqmon {

KpssResult kpss_level(std::span<const double> series, std::optional<int> bandwidth) {
    const std::size_t n = series.size();
    if (n < 8) throw ParameterError("KPSS needs at least 8 observations");
    for (double v : series) {
        if (!std::isfinite(v)) throw DataError("KPSS input contains a non-finite value");
    }
    KpssResult out;
    out.bandwidth = bandwidth ? *bandwidth : stats::bartlett_auto_bandwidth(n);
    if (out.bandwidth < 0 || static_cast<std::size_t>(out.bandwidth) >= n)
        throw ParameterError("KPSS bandwidth must lie in [0, n)");

    const double m = stats::mean(series);
    std::vector<double> e(n);
    for (std::size_t t = 0; t < n; ++t) e[t] = series[t] - m;

    const double lrv = stats::bartlett_long_run_variance(e, out.bandwidth);
    // Relative to the raw scale, a zero long-run variance means a constant series.
    double scale = 0.0;
    for (double v : series) scale = std::max(scale, std::abs(v));
    if (!(lrv > 1e-28 * std::max(1.0, scale * scale))) {
        out.degenerate = true;
        return out;
    }

    double partial = 0.0, sum_sq = 0.0;
    for (double v : e) {
        partial += v;
        sum_sq += partial * partial;
    }
    const double nd = static_cast<double>(n);
    out.statistic = sum_sq / (nd * nd) / lrv;
    out.reject_10 = out.statistic > kKpssCritical10;
    out.reject_5 = out.statistic > kKpssCritical5;
    out.reject_1 = out.statistic > kKpssCritical1;
    return out;
}

}  // namespace seqmon
