#pragma once

#include <optional>

namespace seqmon {

/// Parameters of the curved monitoring boundary
///   g(M,s) = c M^{1/2} (1 + s/M) (s/(M+s))^gamma
/// and of its finite-sample corrected form
///   g^(M,s) = c (1 + (1+gamma) sigma_hat / M^{1/2}) M^{1/2} (1 + s/M) (s/(s+M))^gamma.
struct BoundaryParams {
    double c = 1.0;
    double gamma = 0.0;
    bool corrected = false;
    /// sigma_hat used in the correction factor. When empty, the monitor fills
    /// it in from the fitted model's training sigma_hat.
    std::optional<double> sigma_hat;

    /// Throws ParameterError unless 0 <= gamma < 1/2 and c > 0.
    void validate() const;
};

/// Raw boundary g(M, s). M >= 1, s >= 0 (s = 0 gives the formula's value,
/// which is 0 for gamma > 0).
double boundary_raw(long long M, long long s, const BoundaryParams& params);

/// Corrected boundary; requires params.sigma_hat.
double boundary_corrected(long long M, long long s, const BoundaryParams& params);

/// Dispatches on params.corrected.
double boundary_value(long long M, long long s, const BoundaryParams& params);

/// Detector |sum of post-training residuals| / sigma_hat. A non-finite sum
/// yields +inf (the boundary is then crossed).
double detector(double cumulative_residual_sum, double sigma_hat);

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept;
    double value() const noexcept { return finite_ ? sum_ + compensation_ : raw_; }
    bool finite() const noexcept { return finite_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
    double raw_ = 0.0;
    bool finite_ = true;
};

}  // namespace seqmon
