#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace seqmon {

// Regressor processes --------------------------------------------------------

/// x_{t,k} = rho_k x_{t-1,k} + eta_{t,k}, eta standard normal.
struct Ar1Regressors {
    std::vector<double> rho;
};

/// x_{t,k} = sigma_{t,k} h_{t,k}, sigma^2_{t,k} = omega_k + phi_k x^2_{t-1,k} + psi_k sigma^2_{t-1,k}.
struct GarchRegressors {
    std::vector<double> omega, phi, psi;
};

struct RegressorProcess {
    std::variant<Ar1Regressors, GarchRegressors> kind;
    /// One innovation sequence drives every column.
    bool shared_innovations = false;

    std::size_t dim() const;
    void validate() const;
};

// Error processes ------------------------------------------------------------

struct IidNormalErrors {
    double variance = 1.0;
};

struct GarchErrors {
    double omega = 0.2, phi = 0.3, psi = 0.3;
};

struct ErrorProcess {
    std::variant<IidNormalErrors, GarchErrors> kind;

    void validate() const;
    /// Unconditional variance.
    double variance() const;
};

// Full simulated world -----------------------------------------------------

struct ChangeSpec {
    long s_star = 1;
    std::vector<double> delta_bar;  // post-change (intercept, x_2, ..., x_{d-1}) coefficients
    double delta_d = 0.0;           // post-change autoregressive coefficient
};

inline constexpr long kDefaultBurnIn = 500;

struct DgpSpec {
    std::string name;  // e.g. "v"; empty for custom specs
    RegressorProcess regressors;
    ErrorProcess errors;
    std::vector<double> beta0_bar;  // (intercept, x_2, ..., x_{d-1})
    double beta0_d = 0.0;
    std::optional<ChangeSpec> change;
    long M = 100;
    long extra_horizon = 1000;
    long burn_in = kDefaultBurnIn;
    std::uint64_t seed = 0;

    long d() const { return static_cast<long>(beta0_bar.size()) + 1; }
    void validate() const;
};

/// Sample path indexed t = 0..T (T = M + extra_horizon). Row/element t
/// corresponds to time t; index 0 carries y_0, the lag of the first training row.
struct SimulatedSeries {
    Eigen::MatrixXd exog;      // (T+1) x (d-2)
    std::vector<double> y;     // T+1
    std::vector<double> eps;   // T+1
    long change_index = -1;    // M + s_star, or -1 without a change
};

/// n rows of regressors after discarding burn_in steps from a zero start.
/// GARCH variances start at omega / (1 - phi - psi).
Eigen::MatrixXd gen_regressors(const RegressorProcess& proc, long n, long burn_in, std::uint64_t seed,
                               std::uint64_t stream = 0);

std::vector<double> gen_errors(const ErrorProcess& proc, long n, long burn_in, std::uint64_t seed,
                               std::uint64_t stream = 0);

/// Runs the response recursion over regressors/errors of length burn_in + T + 1:
/// y_t = w_t' beta0_bar + beta0_d y_{t-1} + eps_t through t = M + s_star and the
/// post-change coefficients afterwards. The first burn_in entries (starting from
/// y = 0) are discarded from the output.
SimulatedSeries gen_response(const Eigen::MatrixXd& regressors, std::span<const double> errors,
                             std::span<const double> beta0_bar, double beta0_d,
                             const std::optional<ChangeSpec>& change, long M, long burn_in);

/// Replication `replication` of a spec. Regressors and errors come from
/// disjoint substreams of mix_seed({spec.seed, replication}).
SimulatedSeries simulate(const DgpSpec& spec, std::uint64_t replication);

/// Identifiers i..xii of the built-in Monte Carlo designs.
enum class DgpId { I = 1, II, III, IV, V, VI, VII, VIII, IX, X, XI, XII };

DgpId parse_dgp_id(const std::string& roman);
std::string to_string(DgpId id);
bool is_null_dgp(DgpId id);

/// Built-in designs with their fixed numeric parameters (d = 6). For vii-xii
/// delta_d must be given; for v/vi it defaults to 0.60; for i-iv it must be empty.
DgpSpec make_dgp(DgpId id, long M, long s_star = 1, std::optional<double> delta_d = std::nullopt,
                 std::uint64_t seed = 0);

namespace dgp_params {
inline const std::vector<double> kBeta0Bar{0.02, 0.20, 0.25, 0.15, -0.20};
inline constexpr double kBeta0d = 0.25;
inline const std::vector<double> kDeltaBarV{0.04, 1.60, 0.75, 0.55, 1.20};
inline constexpr double kDeltaDV = 0.60;
inline const std::vector<double> kRho{0.15, 0.20, 0.10, 0.30};
inline const std::vector<double> kOmega{0.3, 0.5, 0.4, 0.6};
inline const std::vector<double> kPhi{0.5, 0.3, 0.2, 0.6};
inline const std::vector<double> kPsi{0.2, 0.3, 0.6, 0.2};
inline constexpr GarchErrors kGarchErrors{0.2, 0.3, 0.3};
}  // namespace dgp_params

}  // namespace seqmon
