#include "procache/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "procache/rng.hpp"

namespace procache {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Disc {
    double x, y;
};

Disc sample_in_disc(Rng& rng, double radius) {
    // inverse-cdf radius keeps the point uniform over the disc
    const double r = radius * std::sqrt(rng.uniform());
    const double phi = 2.0 * kPi * rng.uniform();
    return {r * std::cos(phi), r * std::sin(phi)};
}

std::vector<std::uint32_t> place_cache_rng(std::span<const double> q, std::size_t cache_size_c,
                                           Rng& rng) {
    // cumulative layout of the q mass over [0, C]
    const std::size_t F = q.size();
    std::vector<std::uint32_t> cached;
    const double u = rng.uniform();
    double cum = 0.0;
    std::size_t f = 0;
    for (std::size_t k = 0; k < cache_size_c && f < F; ++k) {
        const double point = u + static_cast<double>(k);
        while (f < F && cum + q[f] <= point) cum += q[f], ++f;
        if (f < F && point >= cum && point < cum + q[f]) {
            cached.push_back(static_cast<std::uint32_t>(f));
            cum += q[f];
            ++f;
        }
    }
    return cached;
}

struct DropCounts {
    std::size_t tagged = 0;
    std::size_t successes = 0;
};

DropCounts run_drop(const PopularityVector& p, const Policy& policy, const NetworkConfig& cfg,
                    const SimOptions& sim, std::uint64_t drop_seed) {
    Rng rng(drop_seed);
    const double R = sim.region_radius;
    const double area = kPi * R * R;
    const std::size_t F = p.size();

    const std::size_t n_bs = static_cast<std::size_t>(rng.poisson(cfg.lambda_b * area));
    const std::size_t n_user = static_cast<std::size_t>(rng.poisson(cfg.lambda_u * area));
    DropCounts counts;
    if (n_bs == 0 || n_user == 0) return counts;

    std::vector<Disc> bs(n_bs);
    for (Disc& b : bs) b = sample_in_disc(rng, R);
    // caches[b] holds a sorted list of cached file indices
    std::vector<std::vector<std::uint32_t>> caches(n_bs);
    for (std::size_t b = 0; b < n_bs; ++b) {
        caches[b] = place_cache_rng(policy.q, cfg.cache_size_c, rng);
        std::sort(caches[b].begin(), caches[b].end());
    }

    struct User {
        Disc pos;
        std::size_t file;
        std::size_t serving;  // BS index or npos on miss
        double dist2;
    };
    constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    std::vector<User> users(n_user);
    std::vector<std::size_t> load(n_bs, 0);
    for (User& u : users) {
        u.pos = sample_in_disc(rng, R);
        // categorical draw from p
        const double z = rng.uniform();
        double cdf = 0.0;
        u.file = F - 1;
        for (std::size_t f = 0; f < F; ++f) {
            cdf += p.probs[f];
            if (z < cdf) {
                u.file = f;
                break;
            }
        }
        // nearest BS caching the requested file; ties broken by index
        u.serving = npos;
        u.dist2 = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < n_bs; ++b) {
            const auto& c = caches[b];
            if (!std::binary_search(c.begin(), c.end(), static_cast<std::uint32_t>(u.file)))
                continue;
            const double dx = u.pos.x - bs[b].x;
            const double dy = u.pos.y - bs[b].y;
            const double d2 = dx * dx + dy * dy;
            if (d2 < u.dist2) {
                u.dist2 = d2;
                u.serving = b;
            }
        }
        if (u.serving != npos) ++load[u.serving];
    }

    // active BSs pick a uniform subband; idle BSs are muted
    std::vector<unsigned> subband(n_bs, 0);
    for (std::size_t b = 0; b < n_bs; ++b)
        if (load[b] > 0)
            subband[b] = static_cast<unsigned>(rng.bounded(sim.subband_count_i)) + 1;

    const double tag_radius2 = 0.25 * R * R;  // inner half radius
    const double beta_w = policy.beta * cfg.bandwidth_w;
    for (const User& u : users) {
        const double r2 = u.pos.x * u.pos.x + u.pos.y * u.pos.y;
        if (r2 > tag_radius2) continue;
        ++counts.tagged;
        if (u.serving == npos) continue;  // no cacher in the disc

        const unsigned band = subband[u.serving];
        const double g0 = rng.exponential();
        const double signal = g0 * std::pow(u.dist2, -0.5 * cfg.alpha);
        double interference = 0.0;
        for (std::size_t b = 0; b < n_bs; ++b) {
            if (b == u.serving || subband[b] != band || load[b] == 0) continue;
            const double dx = u.pos.x - bs[b].x;
            const double dy = u.pos.y - bs[b].y;
            const double d2 = dx * dx + dy * dy;
            interference += rng.exponential() * std::pow(d2, -0.5 * cfg.alpha);
        }
        const double sir = interference > 0.0 ? signal / interference
                                              : std::numeric_limits<double>::infinity();
        const double rate =
            beta_w / static_cast<double>(load[u.serving]) * std::log2(1.0 + sir);
        if (rate >= cfg.rate_threshold_r0) ++counts.successes;
    }
    return counts;
}

}  // namespace

void SimOptions::validate(const NetworkConfig& cfg) const {
    if (num_drops < 1) throw std::invalid_argument("SimOptions.num_drops: must be >= 1");
    if (subband_count_i < 1)
        throw std::invalid_argument("SimOptions.subband_count_i: must be >= 1");
    const double min_radius = 10.0 / std::sqrt(cfg.lambda_b);
    if (!(region_radius >= min_radius))
        throw std::invalid_argument(
            "SimOptions.region_radius: must be >= 10/sqrt(lambda_b) = " +
            std::to_string(min_radius) + " m to keep edge effects small");
}

std::vector<std::uint32_t> place_cache(std::span<const double> q, std::size_t cache_size_c,
                                       std::uint64_t seed) {
    double sum = 0.0;
    for (double v : q) {
        if (!(v >= 0.0 && v <= 1.0 + 1e-12))
            throw std::invalid_argument("place_cache: q entries must be in [0,1]");
        sum += v;
    }
    if (sum > static_cast<double>(cache_size_c) + 1e-9)
        throw std::invalid_argument("place_cache: sum q exceeds the cache capacity");
    Rng rng(seed);
    return place_cache_rng(q, cache_size_c, rng);
}

SimResult simulate_sop(const PopularityVector& p, const Policy& policy,
                       const NetworkConfig& cfg, const SimOptions& sim,
                       const std::string& trace_csv_path) {
    p.validate();
    cfg.validate();
    sim.validate(cfg);
    policy.validate_feasible(cfg.cache_size_c);
    if (p.size() != policy.q.size())
        throw std::invalid_argument("simulate_sop: p and q dimensions disagree");
    const double expected_beta = 1.0 / static_cast<double>(sim.subband_count_i);
    if (std::fabs(policy.beta - expected_beta) > 1e-9)
        throw std::invalid_argument(
            "simulate_sop: beta must equal 1/I; evaluate the closed form at the nearest 1/I");

    std::ofstream trace;
    if (!trace_csv_path.empty()) {
        trace.open(trace_csv_path);
        if (!trace) throw std::runtime_error("simulate_sop: cannot open " + trace_csv_path);
        trace << "drop,users,successes\n";
    }

    SimResult out;
    for (std::size_t d = 0; d < sim.num_drops; ++d) {
        const DropCounts c = run_drop(p, policy, cfg, sim, derive_seed(sim.seed, d));
        out.tagged_users += c.tagged;
        out.successes += c.successes;
        if (trace.is_open()) trace << d << "," << c.tagged << "," << c.successes << "\n";
    }
    if (out.tagged_users > 0) {
        const double n = static_cast<double>(out.tagged_users);
        out.sop_estimate = static_cast<double>(out.successes) / n;
        out.stderr_estimate = std::sqrt(out.sop_estimate * (1.0 - out.sop_estimate) / n);
    }
    return out;
}

}  // namespace procache
