#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace excessd {

/// splitmix64 step; used to derive independent sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Deterministically mixes a base seed with a stream tag.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    std::uint64_t s = base ^ (0xD1B54A32D192ED03ull * (tag + 1));
    std::uint64_t out = splitmix64(s);
    return splitmix64(s) ^ out;
}

/// Deterministic random generator. Distribution functions are written out
/// explicitly instead of using std::*_distribution, whose output sequences
/// are implementation-defined; this keeps draws byte-reproducible across
/// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform on [2^-53, 1).
    double uniform01() {
        double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; the paired variate is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Uniform integer on [lo, hi]. Negligible modulo bias is acceptable for
    /// the step-count jitter and initialization this is used for.
    long uniform_int(long lo, long hi) {
        double u = uniform01();
        long range = hi - lo + 1;
        long k = static_cast<long>(u * static_cast<double>(range));
        if (k >= range) k = range - 1;
        return lo + k;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace excessd
