#pragma once

#include <optional>
#include <span>

namespace seqmon {

/// Level-stationarity KPSS critical values (10%, 5%, 1%).
inline constexpr double kKpssCritical10 = 0.347;
inline constexpr double kKpssCritical5 = 0.463;
inline constexpr double kKpssCritical1 = 0.739;

struct KpssResult {
    double statistic = 0.0;
    int bandwidth = 0;
    bool reject_10 = false;
    bool reject_5 = false;
    bool reject_1 = false;
    /// Zero long-run variance (constant series); the statistic is then 0.
    bool degenerate = false;
};

/// eta = n^{-2} sum_t S_t^2 / s^2(b) on the demeaned series, with S_t its
/// partial sums and s^2(b) the Bartlett long-run variance. Without an explicit
/// bandwidth b = floor(4 (n/100)^{1/4}). Requires n >= 8.
KpssResult kpss_level(std::span<const double> series, std::optional<int> bandwidth = std::nullopt);

}  // namespace seqmon
