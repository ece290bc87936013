#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "procache/types.hpp"

namespace procache {

enum class Fading { rayleigh };

struct SimOptions {
    double region_radius = 2000.0;  // meters; keep >= 10/sqrt(lambda_b)
    std::size_t num_drops = 1000;
    unsigned subband_count_i = 1;   // I; beta must equal 1/I
    Fading fading = Fading::rayleigh;
    std::uint64_t seed = 0;

    void validate(const NetworkConfig& cfg) const;
};

/// Probabilistic placement: the q_f mass is packed into C unit intervals,
/// one uniform offset is drawn, and the files crossed by the C aligned
/// points are cached. Marginal inclusion probability is exactly q_f; at
/// most C files are cached.
std::vector<std::uint32_t> place_cache(std::span<const double> q, std::size_t cache_size_c,
                                       std::uint64_t seed);

struct SimResult {
    double sop_estimate = 0.0;
    double stderr_estimate = 0.0;
    std::size_t tagged_users = 0;
    std::size_t successes = 0;
};

/// Monte-Carlo estimate of the successful-offloading probability under the
/// full system model: PPP base stations and users in a disc, per-BS
/// probabilistic caches, nearest-cacher association, muted idle BSs,
/// uniform random subbands, Rayleigh fading SIR and the per-user rate
/// threshold. Tagged users are restricted to the inner half radius;
/// interference comes from the whole disc. Deterministic per seed with
/// per-drop derived seeds. Pass a csv path to record per-drop counts.
SimResult simulate_sop(const PopularityVector& p, const Policy& policy,
                       const NetworkConfig& cfg, const SimOptions& sim,
                       const std::string& trace_csv_path = "");

}  // namespace procache
