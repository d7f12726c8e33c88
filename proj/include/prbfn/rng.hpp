#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace prbfn {

// Seed splitting for independent substreams (restarts, users, workers).
// Derived seeds depend only on (master, stream), so work partitioned across
// any number of workers reproduces the serial result.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 0x51ed2701a9e3cc71ULL));
}

// Distributions are hand-rolled on top of mt19937_64 because the standard
// engine is bit-exact across platforms while <random> distributions are not.

// Uniform on [0, 1), 53-bit resolution.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on [lo, hi).
inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

// Uniform integer in [0, n), n >= 1.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Standard real Gaussian via Box-Muller.
inline double standard_normal(std::mt19937_64& rng) {
    double u1;
    do {
        u1 = uniform_unit(rng);
    } while (u1 <= 0.0);
    const double u2 = uniform_unit(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Circularly symmetric complex Gaussian with unit variance, CN(0, 1).
inline std::complex<double> standard_complex_gaussian(std::mt19937_64& rng) {
    double u1;
    do {
        u1 = uniform_unit(rng);
    } while (u1 <= 0.0);
    const double u2 = uniform_unit(rng);
    const double r = std::sqrt(-std::log(u1));  // E[|z|^2] = 1
    const double phi = 2.0 * 3.14159265358979323846 * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace prbfn
