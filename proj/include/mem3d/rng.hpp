#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace mem3d {

// Deterministic RNG used everywhere a seed appears in the public interface.
// mt19937_64 output is pinned by the standard; the double conversion below is
// done by hand because std::uniform_real_distribution is not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53 random bits.
    double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    std::uint64_t next_below(std::uint64_t n) { return gen_() % n; }

    // Standard normal via Box-Muller (pair cached).
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - next_double(); // (0, 1]
        double u2 = next_double();
        double mag = std::sqrt(-2.0 * std::log(u1));
        double ang = 2.0 * M_PI * u2;
        spare_ = mag * std::sin(ang);
        has_spare_ = true;
        return mag * std::cos(ang);
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Stable per-item substream: FNV-1a over the tag folded into the seed, so
// per-shape sampling does not depend on manifest order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h ^ (seed * 0x9e3779b97f4a7c15ull);
}

} // namespace mem3d
