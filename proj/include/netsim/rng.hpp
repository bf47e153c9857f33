#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace netsim {

/// Derives independent sub-seeds from a master seed (splitmix64 step),
/// so the uplink, downlink and measurement-noise streams never overlap.
inline uint64_t derive_seed(uint64_t master, uint64_t stream) {
    uint64_t z = master + stream * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic RNG wrapper. Distributions are implemented by hand so the
// sampled sequences do not depend on the standard library implementation.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (pairs are cached).
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace netsim
