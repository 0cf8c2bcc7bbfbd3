#include "oracles.hpp"

#include <doctest.h>
#include <seqmon/critical_values.hpp>
#include <seqmon/errors.hpp>
#include <seqmon/rng.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace seqmon;

namespace {

double sample_quantile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

TEST_CASE("table lookups") {
    CHECK(table_critical_value(0.0, 0.05) == 2.2365);
    CHECK(table_critical_value(0.45, 0.01) == 3.3015);
    CHECK(table_critical_value(0.25, 0.10) == 2.1060);
    const auto cv = critical_value(0.49, 0.25);
    CHECK(cv.value == 2.4487);
    CHECK_FALSE(cv.simulated);
    CHECK(cv.std_error == 0.0);
    CHECK_THROWS_AS(table_critical_value(0.30, 0.05), ParameterError);
    CHECK_THROWS_AS(table_critical_value(0.25, 0.07), ParameterError);
}

TEST_CASE("table is monotone in gamma and alpha") {
    const auto& v = CriticalValueTable::values;
    for (std::size_t g = 0; g < v.size(); ++g) {
        for (std::size_t a = 0; a < v[g].size(); ++a) {
            if (g + 1 < v.size()) CHECK(v[g + 1][a] > v[g][a]);
            if (a + 1 < v[g].size()) CHECK(v[g][a + 1] < v[g][a]);
        }
    }
}

TEST_CASE("simulation is deterministic and sorted") {
    const auto a = simulate_sup_wiener(0.25, 1.0, 100, 1, 42);
    const auto b = simulate_sup_wiener(0.25, 1.0, 100, 1, 42);
    REQUIRE(a.values.size() == 1);
    CHECK(a.values == b.values);
    const auto c = simulate_sup_wiener(0.1, 0.5, 200, 500, 9);
    CHECK(std::is_sorted(c.values.begin(), c.values.end()));
    CHECK(c.values.front() >= 0.0);
}

TEST_CASE("shared paths equal separate runs") {
    const std::vector<double> gammas{0.0, 0.25, 0.49};
    const auto multi = simulate_sup_wiener_multi(gammas, 0.7, 300, 200, 5);
    for (std::size_t k = 0; k < gammas.size(); ++k) {
        CHECK(multi[k].values == simulate_sup_wiener(gammas[k], 0.7, 300, 200, 5).values);
    }
}

TEST_CASE("single path matches a direct evaluation") {
    // Replication 0 draws its increments from Rng(seed, 0).
    const int n = 100;
    const double upper = 0.8, gamma = 0.3;
    Rng rng(77, 0);
    double w = 0.0, best = 0.0;
    for (int i = 1; i <= n; ++i) {
        w += std::sqrt(upper / n) * rng.normal();
        best = std::max(best, std::fabs(w) / std::pow(i * upper / n, gamma));
    }
    const auto s = simulate_sup_wiener(gamma, upper, n, 1, 77);
    CHECK(s.values[0] == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("gamma 0.45 quantile near the tabulated value") {
    const auto s = simulate_sup_wiener(0.45, 1.0, 10'000, 20'000, 11);
    CHECK(std::fabs(s.quantile(0.95) - 2.7992) < 0.05);
    CHECK(s.quantile_std_error(0.95) > 0.0);
}

TEST_CASE("gamma 0 quantile matches the reflection series") {
    const auto s = simulate_sup_wiener(0.0, 1.0, 5'000, 20'000, 3);
    CHECK(std::fabs(s.quantile(0.95) - oracle::sup_abs_wiener_quantile(0.95)) < 0.03);
}

TEST_CASE("simulated source carries provenance and bias warnings") {
    const SimulationSource sim{.grid_size = 500, .reps = 2'000, .seed = 1};
    const auto low = critical_value(0.25, 0.05, sim);
    CHECK(low.simulated);
    CHECK(low.std_error > 0.0);
    CHECK_FALSE(low.bias_warning);
    CHECK(!low.provenance.empty());
    CHECK(critical_value(0.48, 0.05, sim).bias_warning);
    CHECK_THROWS_AS(critical_value(0.25, 1.5, sim), ParameterError);
}

TEST_CASE("closed-end critical values") {
    const SimulationSource sim{.grid_size = 2'000, .reps = 20'000, .seed = 8};
    SUBCASE("large c* approaches the open-ended value") {
        CHECK(std::fabs(closed_end_critical_value(0.0, 0.05, 1e6, sim).value - 2.2365) < 0.03);
    }
    SUBCASE("c* = 1 restricts the supremum to (0, 1/2]") {
        const auto closed = closed_end_critical_value(0.25, 0.05, 1.0, sim);
        const auto open = critical_value(0.25, 0.05, sim);
        CHECK(closed.value < open.value);
        CHECK(closed.provenance.find("0.5") != std::string::npos);
    }
    CHECK_THROWS_AS(closed_end_critical_value(0.0, 0.05, 0.0, sim), ParameterError);
}

TEST_CASE("Brownian scaling of the gamma 0 supremum") {
    const double r = 0.3;
    const auto part = simulate_sup_wiener(0.0, r, 1'000, 50'000, 101);
    const auto full = simulate_sup_wiener(0.0, 1.0, 1'000, 50'000, 202);
    std::vector<double> scaled(part.values);
    for (auto& v : scaled) v /= std::sqrt(r);
    CHECK(oracle::ks_two_sample(scaled, full.values) < 0.02);
}

TEST_CASE("grid refinement changes quantiles by less than 0.02") {
    // Coupled paths: the coarse grid is every fourth point of the fine grid.
    const int fine = 40'000, coarse = 10'000;
    const long reps = 3'000;
    for (double gamma : {0.0, 0.25, 0.45}) {
        std::vector<double> sup_fine(reps), sup_coarse(reps);
        for (long r = 0; r < reps; ++r) {
            Rng rng(555, static_cast<std::uint64_t>(r));
            double w = 0.0, bf = 0.0, bc = 0.0;
            for (int i = 1; i <= fine; ++i) {
                w += std::sqrt(1.0 / fine) * rng.normal();
                const double v = std::fabs(w) / std::pow(static_cast<double>(i) / fine, gamma);
                bf = std::max(bf, v);
                if (i % (fine / coarse) == 0) bc = std::max(bc, v);
            }
            sup_fine[r] = bf;
            sup_coarse[r] = bc;
        }
        for (double p : {0.90, 0.95, 0.99}) {
            CHECK(std::fabs(sample_quantile(sup_fine, p) - sample_quantile(sup_coarse, p)) < 0.02);
        }
    }
}
