#include "seqmon/critical_values.hpp"

#include "seqmon/errors.hpp"
#include "seqmon/parallel.hpp"
#include "seqmon/rng.hpp"
#include "seqmon/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace seqmon {

namespace {

void check_sim_params(double gamma, double upper, int grid_size, long reps) {
    if (!(gamma >= 0.0 && gamma < 0.5)) throw ParameterError("gamma outside [0, 0.5)");
    if (!(upper > 0.0 && upper <= 1.0)) throw ParameterError("sup range endpoint outside (0, 1]");
    if (grid_size < 100) throw ParameterError("grid_size must be >= 100");
    if (reps < 1) throw ParameterError("reps must be >= 1");
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha outside (0, 1)");
}

}  // namespace

double WienerSupSample::quantile(double p) const { return stats::quantile_sorted(values, p); }

double WienerSupSample::quantile_std_error(double p) const { return stats::quantile_std_error_sorted(values, p); }

std::vector<WienerSupSample> simulate_sup_wiener_multi(std::span<const double> gammas, double upper,
                                                       int grid_size, long reps, std::uint64_t seed) {
    if (gammas.empty()) throw ParameterError("no gamma values requested");
    for (double g : gammas) check_sim_params(g, upper, grid_size, reps);

    const std::size_t ng = gammas.size();
    const double step = upper / grid_size;
    const double sd = std::sqrt(step);
    // weight[k][i] = u_i^{-gamma_k}
    std::vector<std::vector<double>> weight(ng, std::vector<double>(static_cast<std::size_t>(grid_size)));
    for (std::size_t k = 0; k < ng; ++k) {
        for (int i = 0; i < grid_size; ++i) {
            weight[k][static_cast<std::size_t>(i)] = std::pow((i + 1) * step, -gammas[k]);
        }
    }

    std::vector<std::vector<double>> sups(ng, std::vector<double>(static_cast<std::size_t>(reps)));
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
        Rng rng(seed, r);
        std::vector<double> best(ng, 0.0);
        double w = 0.0;
        for (int i = 0; i < grid_size; ++i) {
            w += sd * rng.normal();
            const double a = std::abs(w);
            for (std::size_t k = 0; k < ng; ++k) {
                best[k] = std::max(best[k], a * weight[k][static_cast<std::size_t>(i)]);
            }
        }
        for (std::size_t k = 0; k < ng; ++k) sups[k][r] = best[k];
    });

    std::vector<WienerSupSample> out;
    out.reserve(ng);
    for (std::size_t k = 0; k < ng; ++k) {
        std::sort(sups[k].begin(), sups[k].end());
        out.push_back(WienerSupSample{gammas[k], upper, std::move(sups[k]), grid_size, reps, seed});
    }
    return out;
}

WienerSupSample simulate_sup_wiener(double gamma, double upper, int grid_size, long reps, std::uint64_t seed) {
    const double g[] = {gamma};
    return std::move(simulate_sup_wiener_multi(g, upper, grid_size, reps, seed).front());
}

double table_critical_value(double gamma, double alpha) {
    constexpr double tol = 1e-9;
    const auto& gs = CriticalValueTable::gammas;
    const auto& as = CriticalValueTable::alphas;
    const auto gi = std::find_if(gs.begin(), gs.end(), [&](double g) { return std::abs(g - gamma) < tol; });
    const auto ai = std::find_if(as.begin(), as.end(), [&](double a) { return std::abs(a - alpha) < tol; });
    if (gi == gs.end() || ai == as.end()) {
        std::ostringstream msg;
        msg << "(gamma=" << gamma << ", alpha=" << alpha
            << ") is not in the built-in table; use simulation mode (no interpolation is done)";
        throw ParameterError(msg.str());
    }
    return CriticalValueTable::values[static_cast<std::size_t>(gi - gs.begin())]
                                     [static_cast<std::size_t>(ai - as.begin())];
}

namespace {

CriticalValue from_sample(const WienerSupSample& sample, double alpha, const std::string& label) {
    CriticalValue cv;
    cv.value = sample.quantile(1.0 - alpha);
    cv.simulated = true;
    cv.std_error = sample.quantile_std_error(1.0 - alpha);
    cv.bias_warning = sample.gamma >= kGridBiasGamma;
    std::ostringstream p;
    p << label << " (grid=" << sample.grid_size << ", reps=" << sample.reps << ", seed=" << sample.seed
      << ", upper=" << sample.upper << ")";
    cv.provenance = p.str();
    return cv;
}

}  // namespace

CriticalValue critical_value(double gamma, double alpha, const CriticalValueSource& source) {
    check_alpha(alpha);
    if (std::holds_alternative<TableSource>(source)) {
        CriticalValue cv;
        cv.value = table_critical_value(gamma, alpha);
        cv.provenance = "table";
        return cv;
    }
    const auto& sim = std::get<SimulationSource>(source);
    return from_sample(simulate_sup_wiener(gamma, 1.0, sim.grid_size, sim.reps, sim.seed), alpha, "simulated");
}

CriticalValue closed_end_critical_value(double gamma, double alpha, double c_star, const SimulationSource& sim) {
    check_alpha(alpha);
    if (!(c_star > 0.0)) throw ParameterError("c_star must be positive");
    const double upper = c_star / (1.0 + c_star);
    return from_sample(simulate_sup_wiener(gamma, upper, sim.grid_size, sim.reps, sim.seed), alpha,
                       "simulated closed-end");
}

}  // namespace seqmon
