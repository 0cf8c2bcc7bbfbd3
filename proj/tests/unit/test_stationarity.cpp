#include "oracles.hpp"

#include <doctest.h>
#include <seqmon/errors.hpp>
#include <seqmon/rng.hpp>
#include <seqmon/stationarity.hpp>

#include <cmath>
#include <vector>

using namespace seqmon;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
}

}  // namespace

TEST_CASE("constant series is degenerate with statistic 0") {
    const std::vector<double> x(100, 3.25);
    const auto r = kpss_level(x);
    CHECK(r.statistic == 0.0);
    CHECK(r.degenerate);
    CHECK_FALSE(r.reject_10);
    CHECK_FALSE(r.reject_5);
    CHECK_FALSE(r.reject_1);
}

TEST_CASE("linear trend rejects at 1%") {
    std::vector<double> x(500);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] = static_cast<double>(t + 1) / 500.0;
    const auto r = kpss_level(x);
    CHECK(r.statistic > kKpssCritical1);
    CHECK(r.reject_1);
    CHECK(r.statistic == doctest::Approx(oracle::kpss(x, r.bandwidth)).epsilon(1e-10));
}

TEST_CASE("bandwidth rule and oracle agreement") {
    CHECK(kpss_level(noise(100, 1)).bandwidth == 4);
    CHECK(kpss_level(noise(500, 1)).bandwidth == 5);
    CHECK(kpss_level(noise(36, 1)).bandwidth == 3);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto x = noise(50 + 17 * seed, seed);
        for (int l : {0, 2, 7}) {
            const auto r = kpss_level(x, l);
            CHECK(r.bandwidth == l);
            CHECK(r.statistic >= 0.0);
            CHECK(r.statistic == doctest::Approx(oracle::kpss(x, l)).epsilon(1e-10));
        }
    }
}

TEST_CASE("location and scale invariance") {
    const auto x = noise(300, 9);
    const double base = kpss_level(x).statistic;
    std::vector<double> shifted(x), scaled(x);
    for (double k : {-2.0, 0.001, 1e4}) {
        for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = k * x[i];
        CHECK(kpss_level(scaled).statistic == doctest::Approx(base).epsilon(1e-10));
    }
    for (double a : {1.0, -17.5, 1e3}) {
        for (std::size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] + a;
        CHECK(kpss_level(shifted).statistic == doctest::Approx(base).epsilon(1e-10));
    }
}

TEST_CASE("invalid input") {
    CHECK_THROWS_AS(kpss_level(std::vector<double>(5, 1.0)), ParameterError);
    CHECK_THROWS_AS(kpss_level(noise(50, 1), 50), ParameterError);
    CHECK_THROWS_AS(kpss_level(noise(50, 1), -1), ParameterError);
    auto x = noise(50, 1);
    x[10] = std::nan("");
    CHECK_THROWS_AS(kpss_level(x), DataError);
}

TEST_CASE("random walks reject most of the time") {
    int rejected = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        auto x = noise(500, seed);
        for (std::size_t t = 1; t < x.size(); ++t) x[t] += x[t - 1];
        if (kpss_level(x).reject_5) ++rejected;
    }
    CHECK(rejected >= 140);
}
