#include "seqmon/boundary.hpp"

#include "seqmon/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace seqmon {

void BoundaryParams::validate() const {
    if (!(gamma >= 0.0 && gamma < 0.5)) {
        std::ostringstream msg;
        msg << "gamma=" << gamma << " outside [0, 0.5)";
        throw ParameterError(msg.str());
    }
    if (!(c > 0.0)) throw ParameterError("critical value c must be positive");
    if (sigma_hat && !(*sigma_hat >= 0.0)) throw ParameterError("sigma_hat must be non-negative");
}

double boundary_raw(long long M, long long s, const BoundaryParams& params) {
    params.validate();
    if (M < 1) throw ParameterError("training size M must be >= 1");
    if (s < 0) throw ParameterError("monitoring step s must be >= 0");
    const auto m = static_cast<double>(M);
    const auto k = static_cast<double>(s);
    return params.c * std::sqrt(m) * (1.0 + k / m) * std::pow(k / (m + k), params.gamma);
}

double boundary_corrected(long long M, long long s, const BoundaryParams& params) {
    if (!params.sigma_hat) throw ParameterError("corrected boundary requires sigma_hat");
    const double factor = 1.0 + (1.0 + params.gamma) * *params.sigma_hat / std::sqrt(static_cast<double>(M));
    return factor * boundary_raw(M, s, params);
}

double boundary_value(long long M, long long s, const BoundaryParams& params) {
    return params.corrected ? boundary_corrected(M, s, params) : boundary_raw(M, s, params);
}

double detector(double cumulative_residual_sum, double sigma_hat) {
    if (!(sigma_hat > 0.0)) {
        throw DegenerateVarianceError("sigma_hat is zero: training residuals are identically zero");
    }
    if (!std::isfinite(cumulative_residual_sum)) return std::numeric_limits<double>::infinity();
    return std::abs(cumulative_residual_sum) / sigma_hat;
}

void CompensatedSum::add(double x) noexcept {
    raw_ += x;
    if (!std::isfinite(x) || !finite_) {
        finite_ = false;
        return;
    }
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        compensation_ += (sum_ - t) + x;
    } else {
        compensation_ += (x - t) + sum_;
    }
    sum_ = t;
    if (!std::isfinite(sum_)) finite_ = false;
}

}  // namespace seqmon
