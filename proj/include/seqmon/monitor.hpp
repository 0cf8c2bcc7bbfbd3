#pragma once

#include "seqmon/boundary.hpp"
#include "seqmon/model.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace seqmon {

/// Default cap on open-ended monitoring runs.
inline constexpr long kDefaultMaxSteps = 10'000'000;

struct OpenEnded {
    long max_steps = kDefaultMaxSteps;
};
struct ClosedEnd {
    long N = 1;
};
using Horizon = std::variant<OpenEnded, ClosedEnd>;

struct MonitorConfig {
    BoundaryParams boundary;
    Horizon horizon = OpenEnded{};
    long M = 0;
    /// Optional precomputed boundary_raw(M, s) for s = 0..size-1 (shared across
    /// replications of a simulation). Steps beyond its end are computed directly.
    std::shared_ptr<const std::vector<double>> raw_schedule;

    void validate() const;
};

/// Precomputes boundary_raw(M, s) for s = 0..horizon.
std::shared_ptr<const std::vector<double>> make_raw_schedule(long M, long horizon, const BoundaryParams& params);

enum class Status { Running, Stopped, Censored };

struct Decision {
    enum class Kind { Continue, Stop, Censored };
    Kind kind = Kind::Continue;
    long s = 0;
};

/// Online monitoring state for one stream. Single writer: step() must not be
/// called concurrently on the same object.
class MonitorState {
public:
    /// y_M is the last training response; it is the lag of the first monitored row.
    MonitorState(const FittedModel& model, MonitorConfig config, double y_M);

    /// Consumes (exog_{M+s}, y_{M+s}). The row is (1, exog, previous y) and the
    /// residual uses the training coefficients. Stops on strict crossing
    /// detector > boundary; censors at the horizon.
    Decision step(std::span<const double> exog, double y);

    Status status() const noexcept { return status_; }
    long steps() const noexcept { return s_; }
    double cumulative_residual() const noexcept { return sum_.value(); }
    double detector_value() const;
    double boundary_at(long s) const;
    double last_boundary() const noexcept { return last_boundary_; }
    double last_y() const noexcept { return last_y_; }
    const MonitorConfig& config() const noexcept { return config_; }
    const FittedModel& model() const noexcept { return *model_; }

private:
    const FittedModel* model_;
    MonitorConfig config_;
    CompensatedSum sum_;
    long s_ = 0;
    double last_y_;
    double sigma_hat_;
    double correction_ = 1.0;
    double last_boundary_ = 0.0;
    long horizon_ = 0;
    Status status_ = Status::Running;
};

struct TrajectoryPoint {
    long s = 0;
    double detector = 0.0;
    double boundary = 0.0;
    Decision::Kind decision = Decision::Kind::Continue;
};

struct StoppingResult {
    bool stopped = false;
    /// tau when stopped; otherwise the censoring value (N + 1 for closed-end
    /// runs that reached N, else the number of steps consumed).
    long value = 0;
    std::optional<std::vector<TrajectoryPoint>> trajectory;

    bool censored() const noexcept { return !stopped; }
};

struct Observation {
    std::span<const double> exog;
    double y = 0.0;
};

/// Pull-style stream: returns the next observation or nullopt at the end.
using ObservationSource = std::function<std::optional<Observation>()>;

StoppingResult run_stream(const FittedModel& model, const MonitorConfig& config, double y_M,
                          const ObservationSource& source, bool record_trajectory = false);

/// Convenience overload over a materialized series: row t of exog pairs with y[t].
StoppingResult run_stream(const FittedModel& model, const MonitorConfig& config, double y_M,
                          const Eigen::MatrixXd& exog, std::span<const double> y, bool record_trajectory = false);

const char* to_string(Decision::Kind kind);

}  // namespace seqmon
