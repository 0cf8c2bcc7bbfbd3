#include "seqmon/rng.hpp"

#include <bit>
#include <cmath>

namespace seqmon {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto p : parts) {
        h = splitmix64(h ^ splitmix64(p));
    }
    return h;
}

std::uint64_t key_of(double value) noexcept {
    // Round to 1e-9 so that 0.1 typed in a config and 0.1 computed in code agree.
    return static_cast<std::uint64_t>(std::llround(value * 1e9));
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(mix_seed({seed, stream})) {}

double Rng::uniform() noexcept {
    // (k + 0.5) / 2^53 never hits 0 or 1.
    const auto k = engine_() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double Rng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

}  // namespace seqmon
