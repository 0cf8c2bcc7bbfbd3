#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace seqmon {

/// Simulated realizations of sup_{0<u<=upper} |W(u)| / u^gamma.
struct WienerSupSample {
    double gamma = 0.0;
    double upper = 1.0;
    std::vector<double> values;  // ascending
    int grid_size = 0;
    long reps = 0;
    std::uint64_t seed = 0;

    double quantile(double p) const;
    double quantile_std_error(double p) const;
};

/// Simulates W on u_i = i * upper / grid_size (i = 1..grid_size) from Gaussian
/// increments of variance upper / grid_size and records max_i |W(u_i)| / u_i^gamma.
/// Replication r draws from Rng(seed, r).
WienerSupSample simulate_sup_wiener(double gamma, double upper, int grid_size, long reps, std::uint64_t seed);

/// Same as simulate_sup_wiener for several gammas, evaluated on shared paths.
/// Element k equals simulate_sup_wiener(gammas[k], ...) exactly.
std::vector<WienerSupSample> simulate_sup_wiener_multi(std::span<const double> gammas, double upper,
                                                       int grid_size, long reps, std::uint64_t seed);

/// Built-in table of c(gamma, alpha) for the open-ended monitoring limit.
struct CriticalValueTable {
    static constexpr std::array<double, 6> gammas{0.00, 0.15, 0.25, 0.35, 0.45, 0.49};
    static constexpr std::array<double, 5> alphas{0.010, 0.025, 0.050, 0.100, 0.250};
    // clang-format off
    static constexpr std::array<std::array<double, 5>, 6> values{{
        {2.7912, 2.4948, 2.2365, 1.9497, 1.5213},
        {2.8516, 2.5475, 2.2996, 2.0273, 1.6126},
        {2.9445, 2.6396, 2.3860, 2.1060, 1.7039},
        {3.0475, 2.7394, 2.5050, 2.2433, 1.8467},
        {3.3015, 3.0144, 2.7992, 2.5437, 2.1729},
        {3.5705, 3.2944, 3.0722, 2.8259, 2.4487},
    }};
    // clang-format on
};

/// Exact table entry; throws ParameterError when (gamma, alpha) is not tabulated.
double table_critical_value(double gamma, double alpha);

struct TableSource {};
struct SimulationSource {
    int grid_size = 10'000;
    long reps = 50'000;
    std::uint64_t seed = 20240601;
};
using CriticalValueSource = std::variant<TableSource, SimulationSource>;

struct CriticalValue {
    double value = 0.0;
    bool simulated = false;
    double std_error = 0.0;    // Monte Carlo standard error (0 for table values)
    bool bias_warning = false;  // simulation with gamma >= 0.47: grid bias is largest there
    std::string provenance;
};

/// Gammas at or above this value get a discretization-bias warning.
inline constexpr double kGridBiasGamma = 0.47;

CriticalValue critical_value(double gamma, double alpha, const CriticalValueSource& source = TableSource{});

/// Critical value for closed-end monitoring over N ~ c_star * M steps: the
/// (1 - alpha) quantile of the supremum over (0, c_star / (1 + c_star)].
CriticalValue closed_end_critical_value(double gamma, double alpha, double c_star, const SimulationSource& sim);

}  // namespace seqmon
