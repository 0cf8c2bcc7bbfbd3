#include "seqmon/monitor.hpp"

#include "seqmon/errors.hpp"

#include <cmath>
#include <sstream>

namespace seqmon {

void MonitorConfig::validate() const {
    boundary.validate();
    if (M < 1) throw ParameterError("monitor config needs M >= 1");
    if (const auto* open = std::get_if<OpenEnded>(&horizon)) {
        if (open->max_steps < 1) throw ParameterError("max_steps must be >= 1");
    } else if (std::get<ClosedEnd>(horizon).N < 1) {
        throw ParameterError("closed-end horizon N must be >= 1");
    }
}

std::shared_ptr<const std::vector<double>> make_raw_schedule(long M, long horizon, const BoundaryParams& params) {
    auto out = std::make_shared<std::vector<double>>(static_cast<std::size_t>(horizon) + 1);
    for (long s = 0; s <= horizon; ++s) (*out)[static_cast<std::size_t>(s)] = boundary_raw(M, s, params);
    return out;
}

MonitorState::MonitorState(const FittedModel& model, MonitorConfig config, double y_M)
    : model_(&model), config_(std::move(config)), last_y_(y_M), sigma_hat_(model.sigma_hat()) {
    config_.validate();
    if (config_.M != model.M()) {
        std::ostringstream msg;
        msg << "monitor config M=" << config_.M << " differs from the fitted model's M=" << model.M();
        throw ParameterError(msg.str());
    }
    if (!(sigma_hat_ > 0.0)) {
        throw DegenerateVarianceError("training residual variance is zero; the detector is undefined");
    }
    if (config_.boundary.corrected) {
        if (!config_.boundary.sigma_hat) config_.boundary.sigma_hat = sigma_hat_;
        correction_ = 1.0 + (1.0 + config_.boundary.gamma) * *config_.boundary.sigma_hat /
                                std::sqrt(static_cast<double>(config_.M));
    }
    if (const auto* open = std::get_if<OpenEnded>(&config_.horizon)) {
        horizon_ = open->max_steps;
    } else {
        horizon_ = std::get<ClosedEnd>(config_.horizon).N;
    }
}

double MonitorState::detector_value() const { return detector(sum_.value(), sigma_hat_); }

double MonitorState::boundary_at(long s) const {
    const auto& sched = config_.raw_schedule;
    const double raw = sched && s >= 0 && static_cast<std::size_t>(s) < sched->size()
                           ? (*sched)[static_cast<std::size_t>(s)]
                           : boundary_raw(config_.M, s, config_.boundary);
    // Same arithmetic as boundary_corrected: factor * raw.
    return config_.boundary.corrected ? correction_ * raw : raw;
}

Decision MonitorState::step(std::span<const double> exog, double y) {
    if (status_ != Status::Running) throw StateError("monitor has already stopped or been censored");
    const double fitted = model_->predict(exog, last_y_);
    sum_.add(y - fitted);
    ++s_;
    last_y_ = y;
    last_boundary_ = boundary_at(s_);
    if (detector_value() > last_boundary_) {
        status_ = Status::Stopped;
        return {Decision::Kind::Stop, s_};
    }
    if (s_ >= horizon_) {
        status_ = Status::Censored;
        return {Decision::Kind::Censored, s_};
    }
    return {Decision::Kind::Continue, s_};
}

StoppingResult run_stream(const FittedModel& model, const MonitorConfig& config, double y_M,
                          const ObservationSource& source, bool record_trajectory) {
    MonitorState state(model, config, y_M);
    StoppingResult result;
    if (record_trajectory) result.trajectory.emplace();
    while (state.status() == Status::Running) {
        auto obs = source();
        if (!obs) break;
        const Decision dec = state.step(obs->exog, obs->y);
        if (record_trajectory) {
            result.trajectory->push_back({dec.s, state.detector_value(), state.last_boundary(), dec.kind});
        }
    }
    switch (state.status()) {
        case Status::Stopped:
            result.stopped = true;
            result.value = state.steps();
            break;
        case Status::Censored:
            result.value = std::holds_alternative<ClosedEnd>(config.horizon) ? state.steps() + 1 : state.steps();
            break;
        case Status::Running:
            result.value = state.steps();
            break;
    }
    return result;
}

StoppingResult run_stream(const FittedModel& model, const MonitorConfig& config, double y_M,
                          const Eigen::MatrixXd& exog, std::span<const double> y, bool record_trajectory) {
    if (static_cast<std::size_t>(exog.rows()) != y.size())
        throw DimensionError("monitoring regressors and responses differ in length");
    std::size_t t = 0;
    std::vector<double> row(static_cast<std::size_t>(exog.cols()));
    ObservationSource source = [&]() -> std::optional<Observation> {
        if (t >= y.size()) return std::nullopt;
        for (Eigen::Index k = 0; k < exog.cols(); ++k) row[static_cast<std::size_t>(k)] = exog(static_cast<Eigen::Index>(t), k);
        return Observation{row, y[t++]};
    };
    return run_stream(model, config, y_M, source, record_trajectory);
}

const char* to_string(Decision::Kind kind) {
    switch (kind) {
        case Decision::Kind::Continue:
            return "continue";
        case Decision::Kind::Stop:
            return "stop";
        case Decision::Kind::Censored:
            return "censored";
    }
    return "unknown";
}

}  // namespace seqmon
