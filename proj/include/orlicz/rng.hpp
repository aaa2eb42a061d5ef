#pragma once

#include <cmath>
#include <cstdint>

namespace orlicz {

// Deterministic counter-style generator (splitmix64): the state advances by
// a fixed odd constant and each output is a finalizer hash of the counter.
// Chosen over std::mt19937 + std::distributions because the C++ standard
// does not pin distribution algorithms, and reproducibility across
// platforms/compilers is part of the sampling contract here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0, 1): 52 mantissa bits plus a half-ulp
    // offset, so 0 and 1 are unreachable.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1p-52;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // index uniform on {0, ..., bound-1}; modulo bias is < 2^-53 for the
    // bounds used here (coordinate counts), far below statistical noise.
    std::uint64_t below(std::uint64_t bound) { return next_u64() % bound; }

    // Standard normal via the Marsaglia polar method; the spare root is
    // discarded to keep draw-count bookkeeping trivial.
    double normal() {
        while (true) {
            const double u = 2.0 * uniform01() - 1.0;
            const double v = 2.0 * uniform01() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0)
                return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    double exponential() { return -std::log(uniform01()); }

    // Gamma(shape, 1) via Marsaglia–Tsang, with the standard power boost
    // for shape < 1.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform01(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        while (true) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    std::uint64_t state_;
};

// Seed for a numbered stream: chains, replications and stages hash their
// index into the master seed so results never depend on scheduling order.
inline std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t z = master_seed ^ (0xD1B54A32D192ED03ull * (index + 1));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= 0x9E3779B97F4A7C15ull + index;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    return z ^ (z >> 31);
}

}  // namespace orlicz
