#pragma once

#include "seqmon/critical_values.hpp"
#include "seqmon/dgp.hpp"
#include "seqmon/experiments.hpp"
#include "seqmon/monitor.hpp"

#include <Eigen/Dense>

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace seqmon {

// Data ingestion -------------------------------------------------------------

struct ColumnTransform {
    enum class Op { Identity, DiffLog, Lag, DiffLogThenLag };
    std::string column;
    Op op = Op::Identity;
    int k = 0;  // lag depth for Lag / DiffLogThenLag

    /// Leading rows consumed: 0, 1, k or 1 + k.
    int depth() const;
    void validate() const;
    /// "identity", "diff_log", "lag(2)", "diff_log_then_lag(1)".
    std::string describe() const;
};

/// Parses "identity", "diff_log", "lag", "diff_log_then_lag" (k supplied separately).
ColumnTransform::Op parse_transform_op(const std::string& name);

struct ColumnMap {
    std::string date_column;  // empty: row numbers serve as labels
    ColumnTransform response;
    std::vector<ColumnTransform> exog;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(const std::string& name) const;
};

/// Header row plus data rows; fields may be double-quoted. Ragged rows raise DataError.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

struct Dataset {
    std::vector<std::string> dates;
    std::vector<double> y;
    Eigen::MatrixXd exog;               // rows aligned with y
    std::vector<std::string> exog_names;
    int offset = 0;                     // leading raw rows dropped by the transforms
};

/// Applies the transforms and drops the leading rows that any of them leaves
/// undefined, so all series share one time index.
Dataset ingest_csv(const CsvTable& table, const ColumnMap& map);
Dataset ingest_csv(const std::string& path, const ColumnMap& map);

/// Applies a single transform to a raw column; the first depth() entries are NaN.
std::vector<double> apply_transform(std::span<const double> raw, const ColumnTransform& t);

// Run configuration ----------------------------------------------------------

struct MonitorRunConfig {
    std::string data_path;
    ColumnMap columns;
    long training_start = 1;             // 1-based aligned row of the first training observation
    long M = 0;
    std::optional<double> y0;            // lag of the first training row
    double gamma = 0.0;
    double alpha = 0.05;
    bool corrected = true;
    CriticalValueSource cv_source = TableSource{};
    std::optional<double> c_override;
    std::optional<long> closed_end_N;    // otherwise open-ended
    long max_steps = kDefaultMaxSteps;
    std::string output_dir = ".";
    std::string trajectory_file = "trajectory.csv";

    /// Throws ConfigError.
    void validate() const;
};

/// TOML when the file ends in .toml, JSON otherwise. Errors raise ConfigError.
MonitorRunConfig load_monitor_config(const std::string& path);
MonitorRunConfig parse_monitor_config(const std::string& text, bool toml);
/// Every field with its effective value, as JSON.
std::string monitor_config_to_json(const MonitorRunConfig& config);

ExperimentPlan load_experiment_plan(const std::string& path);
ExperimentPlan parse_experiment_plan(const std::string& text, bool toml);

TauDensityRequest load_tau_density_request(const std::string& path);
TauDensityRequest parse_tau_density_request(const std::string& text, bool toml);

/// DGP spec documents: either {dgp = "v", M, s_star, delta_d, seed} for a
/// built-in design or fully explicit processes and coefficients.
DgpSpec parse_dgp_spec(const std::string& text, bool toml);
std::string dgp_spec_to_json(const DgpSpec& spec);

/// CSV with columns t, y, x2..x{d-1} and optionally eps.
std::string series_to_csv(const SimulatedSeries& series, bool include_eps);

// Commands -------------------------------------------------------------------

struct MonitorReport {
    std::optional<long> tau;
    bool censored = false;
    long steps_monitored = 0;
    long censor_value = 0;               // N + 1 for a completed closed-end run, else steps monitored
    std::optional<std::string> date;     // label of the detection row
    long training_first_row = 0;         // 1-based aligned rows
    long training_last_row = 0;
    double gamma = 0.0;
    double alpha = 0.0;
    double c = 0.0;
    std::string c_source;
    long M = 0;
    double sigma_hat = 0.0;
    std::vector<double> beta_hat;
    std::string trajectory_path;
    std::vector<std::string> warnings;
    std::string config_json;             // effective configuration
    std::optional<std::string> timestamp;

    /// {tau, censored, date, gamma, alpha, c, c_source, M, sigma_hat,
    /// trajectory_path, manifest}; the timestamp sits inside manifest only.
    std::string to_json() const;
    std::string to_text() const;
};

struct CommandOptions {
    bool write_trajectory = true;
    bool timestamp = true;
};

/// Fits on the M rows starting at config.training_start and monitors every
/// following row. Without y0 the row before the window supplies the initial
/// lag; a window starting at row 1 then consumes row 1 for that purpose.
MonitorReport monitor_command(const MonitorRunConfig& config, const Dataset& data, const CommandOptions& options = {});

/// monitor_command with the training window moved to new_training_start.
/// A window starting before previous_detection_row is allowed with a warning.
MonitorReport remonitor_command(const MonitorRunConfig& config, const Dataset& data, long new_training_start,
                                std::optional<long> previous_detection_row = std::nullopt,
                                const CommandOptions& options = {});

std::string trajectory_to_csv(const std::vector<TrajectoryPoint>& trajectory);

/// 0 for success, 2 for configuration errors, 3 for data and numerical errors.
int exit_code_for(const std::exception& e);

}  // namespace seqmon
