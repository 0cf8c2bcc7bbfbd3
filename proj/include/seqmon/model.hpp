#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace seqmon {

/// Regressor vector (1, x_2, ..., x_{d-1}, y_{t-1}) of the linear-plus-AR(1)
/// model. The first coordinate is always 1 and the last is the lagged response.
class DesignRow {
public:
    DesignRow(std::span<const double> exog, double lag);

    std::size_t dim() const noexcept { return coords_.size(); }
    double intercept() const noexcept { return coords_.front(); }
    double lag() const noexcept { return coords_.back(); }
    std::span<const double> exog() const noexcept {
        return std::span<const double>(coords_).subspan(1, coords_.size() - 2);
    }
    std::span<const double> coords() const noexcept { return coords_; }

private:
    std::vector<double> coords_;
};

struct DesignData {
    std::vector<DesignRow> rows;
    std::vector<double> responses;
};

/// Pairs each response y_t (t >= start_index, 1-based) with the row
/// (1, exog_t, y_{t-1}). `exog` holds one row per time index and d - 2 columns.
DesignData build_design(std::span<const double> y, const Eigen::MatrixXd& exog, std::size_t start_index = 2);

/// The M training observations stacked as an M x d design matrix plus responses.
class TrainingSample {
public:
    explicit TrainingSample(const DesignData& design);
    TrainingSample(Eigen::MatrixXd design, Eigen::VectorXd responses);

    /// Training window y_1..y_M with the lag of the first row given explicitly.
    static TrainingSample from_series(std::span<const double> y, const Eigen::MatrixXd& exog, double y0);
    /// Uses y[0] only as the lag of the first row; M = y.size() - 1.
    static TrainingSample with_warmup(std::span<const double> y, const Eigen::MatrixXd& exog);

    const Eigen::MatrixXd& design() const noexcept { return design_; }
    const Eigen::VectorXd& responses() const noexcept { return responses_; }
    long M() const noexcept { return static_cast<long>(design_.rows()); }
    long d() const noexcept { return static_cast<long>(design_.cols()); }

private:
    void validate() const;

    Eigen::MatrixXd design_;
    Eigen::VectorXd responses_;
};

/// Least-squares fit of the training window. Immutable once built.
class FittedModel {
public:
    FittedModel(Eigen::VectorXd beta_hat, double sigma_hat_sq, Eigen::MatrixXd gram, Eigen::VectorXd residuals,
                long M);

    const Eigen::VectorXd& beta_hat() const noexcept { return beta_hat_; }
    double sigma_hat_sq() const noexcept { return sigma_hat_sq_; }
    double sigma_hat() const noexcept;
    /// X^T X / M.
    const Eigen::MatrixXd& gram() const noexcept { return gram_; }
    const Eigen::VectorXd& residuals() const noexcept { return residuals_; }
    long d() const noexcept { return static_cast<long>(beta_hat_.size()); }
    long M() const noexcept { return M_; }

    /// Fitted value for (1, exog, lag); exog must have d - 2 entries.
    double predict(std::span<const double> exog, double lag) const;

private:
    Eigen::VectorXd beta_hat_;
    double sigma_hat_sq_;
    Eigen::MatrixXd gram_;
    Eigen::VectorXd residuals_;
    long M_;
};

/// Reciprocal condition threshold of the column-equilibrated Gram matrix below
/// which the fit is refused.
inline constexpr double kSingularityThreshold = 1e-12;

/// Ordinary least squares via column-pivoted Householder QR of the design.
/// sigma_hat_sq = RSS / (M - d). Throws SingularMatrixError naming the
/// collinear columns when the Gram matrix is numerically singular.
FittedModel fit_ols(const TrainingSample& sample);

/// y - row . beta_hat, always with the training-window coefficients.
double residual(const FittedModel& model, const DesignRow& row, double y);

/// Human-readable name of design column k (0-based): intercept, x2.., lag.
std::string column_name(long k, long d);

}  // namespace seqmon
