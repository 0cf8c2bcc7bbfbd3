#pragma once

#include "seqmon/critical_values.hpp"
#include "seqmon/dgp.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace seqmon {

/// One boundary to evaluate on every replication of a cell.
struct MonitorSetting {
    double gamma = 0.0;
    double c = 1.0;
    bool corrected = true;
};

/// Stopping outcomes of one replication for each setting, in the setting order.
/// A value of 0 means no crossing within the horizon.
struct ReplicationOutcome {
    std::vector<long> tau;
};

/// Runs `reps` replications of spec (replication r = simulate(spec, r)): fits the
/// training window t = 1..M and monitors t = M+1..M+horizon under every setting.
/// The spec's extra_horizon must cover the monitoring horizon.
std::vector<ReplicationOutcome> simulate_stopping_times(const DgpSpec& spec, std::span<const MonitorSetting> settings,
                                                        long reps, long horizon);

struct ExperimentPlan {
    std::vector<DgpId> dgps;
    std::vector<long> Ms{50, 100, 150, 300};
    std::vector<double> gammas{0.0, 0.25, 0.45, 0.49};
    std::vector<double> alphas{0.10, 0.05, 0.01};
    std::vector<long> s_stars{1};           // ignored for no-change designs
    std::vector<double> delta_ds;           // post-change AR coefficients for vii..xii
    long reps = 10'000;
    long horizon_multiple = 10;             // monitoring stops after horizon_multiple * M steps
    std::uint64_t master_seed = 20240601;
    bool corrected = true;
    CriticalValueSource cv_source = TableSource{};
    std::optional<double> c_override;       // replaces c(gamma, alpha) in every cell

    void validate() const;
};

struct TauSummary {
    double mean = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
};

struct CellResult {
    std::string dgp;
    long M = 0;
    long s_star = 0;                 // 0 for no-change designs
    std::optional<double> delta_d;
    double gamma = 0.0;
    double alpha = 0.0;
    double c = 0.0;
    long reps = 0;
    long detections = 0;
    double rate_percent = 0.0;       // detections within the horizon, in percent
    double se_percent = 0.0;         // 100 sqrt(p (1 - p) / reps)
    std::optional<TauSummary> tau;   // over detecting replications
    /// Size studies: cumulative false-detection percentage at horizons i*M, i = 1..horizon_multiple.
    std::vector<double> horizon_rates;
};

struct ExperimentReport {
    std::string kind;  // "size" or "power"
    std::uint64_t master_seed = 0;
    long reps = 0;
    double wall_seconds = 0.0;
    std::vector<CellResult> cells;

    /// One row per cell; horizon rates are emitted as rate_h1..rate_hK for size studies.
    std::string to_csv() const;
    /// Summary with metadata and every cell.
    std::string to_json() const;
    /// Long-format horizon-vs-rate table for plotting size curves.
    std::string horizon_csv() const;
};

/// Cell seed: mix_seed({master, dgp, M, s*, delta}). gamma and alpha are not
/// part of it, so every boundary in a cell sees the same sample paths.
std::uint64_t cell_seed(std::uint64_t master, DgpId id, long M, long s_star, std::optional<double> delta_d);

/// Cumulative false-detection rates under the no-change designs i..iv.
ExperimentReport run_size_study(const ExperimentPlan& plan);

/// Empirical power under the change designs v..xii. Replications without a
/// crossing within the horizon count as non-detections.
ExperimentReport run_power_study(const ExperimentPlan& plan);

struct TauDensityRequest {
    DgpSpec spec;
    MonitorSetting setting;
    long reps = 10'000;
    long horizon = 0;      // 0 means 10 * M
    int bins = 50;
    int density_points = 200;
};

struct TauDensity {
    std::vector<long> taus;          // detecting replications, ascending
    double censored_fraction = 0.0;
    std::vector<double> bin_edges;   // bins + 1 entries
    std::vector<long> counts;
    std::vector<double> density_x;
    std::vector<double> density_y;

    std::string histogram_csv() const;
    std::string density_csv() const;
};

TauDensity tau_density(const TauDensityRequest& request);

}  // namespace seqmon
