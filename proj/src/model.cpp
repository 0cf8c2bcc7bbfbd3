#include "seqmon/model.hpp"

#include "seqmon/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace seqmon {

DesignRow::DesignRow(std::span<const double> exog, double lag) {
    coords_.reserve(exog.size() + 2);
    coords_.push_back(1.0);
    coords_.insert(coords_.end(), exog.begin(), exog.end());
    coords_.push_back(lag);
}

DesignData build_design(std::span<const double> y, const Eigen::MatrixXd& exog, std::size_t start_index) {
    if (static_cast<std::size_t>(exog.rows()) != y.size()) {
        std::ostringstream msg;
        msg << "response has " << y.size() << " observations but regressors have " << exog.rows();
        throw DimensionError(msg.str());
    }
    if (start_index < 2) throw ParameterError("start_index must be >= 2 so that the lag exists");
    DesignData out;
    std::vector<double> buf(static_cast<std::size_t>(exog.cols()));
    for (std::size_t t = start_index - 1; t < y.size(); ++t) {
        for (Eigen::Index k = 0; k < exog.cols(); ++k) buf[k] = exog(static_cast<Eigen::Index>(t), k);
        out.rows.emplace_back(buf, y[t - 1]);
        out.responses.push_back(y[t]);
    }
    return out;
}

TrainingSample::TrainingSample(const DesignData& design) {
    if (design.rows.size() != design.responses.size())
        throw DimensionError("design rows and responses differ in length");
    if (design.rows.empty()) throw ParameterError("empty training sample");
    const auto d = static_cast<Eigen::Index>(design.rows.front().dim());
    design_.resize(static_cast<Eigen::Index>(design.rows.size()), d);
    responses_.resize(design_.rows());
    for (std::size_t t = 0; t < design.rows.size(); ++t) {
        const auto& row = design.rows[t];
        if (static_cast<Eigen::Index>(row.dim()) != d) throw DimensionError("design rows differ in dimension");
        for (Eigen::Index k = 0; k < d; ++k) design_(static_cast<Eigen::Index>(t), k) = row.coords()[k];
        responses_(static_cast<Eigen::Index>(t)) = design.responses[t];
    }
    validate();
}

TrainingSample::TrainingSample(Eigen::MatrixXd design, Eigen::VectorXd responses)
    : design_(std::move(design)), responses_(std::move(responses)) {
    if (design_.rows() != responses_.size()) throw DimensionError("design rows and responses differ in length");
    validate();
}

TrainingSample TrainingSample::from_series(std::span<const double> y, const Eigen::MatrixXd& exog, double y0) {
    if (static_cast<std::size_t>(exog.rows()) != y.size())
        throw DimensionError("response and regressor series differ in length");
    const auto M = static_cast<Eigen::Index>(y.size());
    const auto d = exog.cols() + 2;
    Eigen::MatrixXd X(M, d);
    Eigen::VectorXd resp(M);
    for (Eigen::Index t = 0; t < M; ++t) {
        X(t, 0) = 1.0;
        X.row(t).segment(1, exog.cols()) = exog.row(t);
        X(t, d - 1) = t == 0 ? y0 : y[static_cast<std::size_t>(t - 1)];
        resp(t) = y[static_cast<std::size_t>(t)];
    }
    return TrainingSample(std::move(X), std::move(resp));
}

TrainingSample TrainingSample::with_warmup(std::span<const double> y, const Eigen::MatrixXd& exog) {
    if (y.size() < 2) throw ParameterError("warm-up form needs at least two observations");
    if (static_cast<std::size_t>(exog.rows()) != y.size())
        throw DimensionError("response and regressor series differ in length");
    return TrainingSample(build_design(y, exog, 2));
}

void TrainingSample::validate() const {
    if (design_.cols() < 2) throw DimensionError("design needs at least the intercept and lag columns");
    if (design_.rows() <= design_.cols()) {
        std::ostringstream msg;
        msg << "training sample size M=" << design_.rows() << " must exceed d=" << design_.cols();
        throw ParameterError(msg.str());
    }
    for (Eigen::Index t = 0; t < design_.rows(); ++t) {
        if (design_(t, 0) != 1.0) throw DimensionError("first design column must be the constant 1");
    }
}

FittedModel::FittedModel(Eigen::VectorXd beta_hat, double sigma_hat_sq, Eigen::MatrixXd gram,
                         Eigen::VectorXd residuals, long M)
    : beta_hat_(std::move(beta_hat)),
      sigma_hat_sq_(sigma_hat_sq),
      gram_(std::move(gram)),
      residuals_(std::move(residuals)),
      M_(M) {
    if (beta_hat_.size() < 2) throw DimensionError("model needs at least the intercept and lag coefficients");
    if (!(sigma_hat_sq_ >= 0.0)) throw ParameterError("residual variance must be non-negative");
}

double FittedModel::sigma_hat() const noexcept { return std::sqrt(sigma_hat_sq_); }

double FittedModel::predict(std::span<const double> exog, double lag) const {
    const auto d = beta_hat_.size();
    if (static_cast<Eigen::Index>(exog.size()) != d - 2) {
        std::ostringstream msg;
        msg << "expected " << d - 2 << " exogenous values, got " << exog.size();
        throw DimensionError(msg.str());
    }
    double fit = beta_hat_(0);
    for (std::size_t k = 0; k < exog.size(); ++k) fit += exog[k] * beta_hat_(static_cast<Eigen::Index>(k) + 1);
    return fit + lag * beta_hat_(d - 1);
}

std::string column_name(long k, long d) {
    if (k == 0) return "intercept";
    if (k == d - 1) return "lag";
    return "x" + std::to_string(k + 1);
}

namespace {

[[noreturn]] void report_singular(const Eigen::MatrixXd& gram_eq, double rcond) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_eq);
    const Eigen::VectorXd null_dir = eig.eigenvectors().col(0);
    const long d = static_cast<long>(gram_eq.rows());
    std::ostringstream msg;
    msg << "Gram matrix is numerically singular (reciprocal condition " << rcond << " < "
        << kSingularityThreshold << "); collinear columns:";
    const double top = null_dir.cwiseAbs().maxCoeff();
    for (long k = 0; k < d; ++k) {
        if (std::abs(null_dir(k)) > 0.1 * top) msg << ' ' << column_name(k, d);
    }
    throw SingularMatrixError(msg.str());
}

}  // namespace

FittedModel fit_ols(const TrainingSample& sample) {
    const Eigen::MatrixXd& X = sample.design();
    const Eigen::VectorXd& y = sample.responses();
    const long M = sample.M();
    const long d = sample.d();

    Eigen::MatrixXd gram = (X.transpose() * X) / static_cast<double>(M);

    // Conditioning is judged on the unit-diagonal version so that the units of
    // a regressor do not matter.
    const Eigen::VectorXd scale = gram.diagonal().cwiseSqrt();
    for (long k = 0; k < d; ++k) {
        if (!(scale(k) > 0.0)) {
            throw SingularMatrixError("design column " + column_name(k, d) + " is identically zero");
        }
    }
    const Eigen::MatrixXd gram_eq = scale.cwiseInverse().asDiagonal() * gram * scale.cwiseInverse().asDiagonal();
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram_eq, Eigen::EigenvaluesOnly)
                                   .eigenvalues();
    const double rcond = ev.maxCoeff() > 0.0 ? std::max(ev.minCoeff(), 0.0) / ev.maxCoeff() : 0.0;
    if (!(rcond >= kSingularityThreshold)) report_singular(gram_eq, rcond);

    Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    Eigen::VectorXd resid = y - X * beta;
    const double sigma_sq = resid.squaredNorm() / static_cast<double>(M - d);
    return FittedModel(std::move(beta), sigma_sq, std::move(gram), std::move(resid), M);
}

double residual(const FittedModel& model, const DesignRow& row, double y) {
    if (static_cast<long>(row.dim()) != model.d()) {
        std::ostringstream msg;
        msg << "design row has dimension " << row.dim() << " but the model has d=" << model.d();
        throw DimensionError(msg.str());
    }
    return y - model.predict(row.exog(), row.lag());
}

}  // namespace seqmon
