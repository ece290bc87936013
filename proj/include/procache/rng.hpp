#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace procache {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream seed derived from a master seed; used so parallel or
/// per-sample work stays reproducible regardless of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 1));
}

/// mt19937_64 with explicit, implementation-independent conversions.
/// std::uniform_*_distribution output is not pinned by the standard, so all
/// draws used for reproducible artifacts go through this wrapper.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// uniform in [0,1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// uniform integer in [0, n) by rejection (unbiased)
    std::uint64_t bounded(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            const std::uint64_t r = eng_();
            if (r >= threshold) return r % n;
        }
    }

    /// unit-mean exponential
    double exponential() {
        double u;
        do { u = uniform(); } while (u <= 0.0);
        return -std::log1p(-u);
    }

    /// Poisson by inversion; large means split additively so exp(-mean)
    /// never underflows
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean > 500.0) return poisson(mean * 0.5) + poisson(mean * 0.5);
        const double target = uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        while (cdf < target && k < 100000000ULL) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

    /// Pareto with given shape and scale (minimum value = scale)
    double pareto(double shape, double scale) {
        double u;
        do { u = uniform(); } while (u <= 0.0);
        return scale * std::pow(u, -1.0 / shape);
    }

private:
    std::mt19937_64 eng_;
};

/// FNV-1a 64-bit, used for stable config hashes in manifests.
inline std::uint64_t fnv1a(const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace procache
