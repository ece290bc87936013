#pragma once

#include <cstdint>
#include <vector>

#include "procache/analytics.hpp"
#include "procache/types.hpp"

namespace procache {

struct SolverOptions {
    std::size_t max_iters = 400;
    double step_size = 0.5;
    double tolerance = 1e-7;   // projected-gradient norm
    std::uint64_t seed = 0;
    std::size_t restarts = 5;  // popularity-proportional start + random restarts
    double beta_min = 1e-3;    // replaces the open constraint beta > 0
    double fixed_beta = 0.0;   // > 0 pins beta (q-only optimization)

    void validate() const;
};

struct SolveResult {
    Policy policy;
    double achieved_sop = 0.0;
    bool converged = false;      // projected-gradient norm met tolerance
    std::size_t iterations = 0;  // iterations spent by the winning restart
};

/// Maximizes sop over (beta, q) subject to q in [0,1]^F, sum q <= C,
/// beta_min <= beta <= 1, by projected gradient ascent with multi-start.
/// Deterministic per (inputs, seed); ties between restarts break toward the
/// lowest restart index.
SolveResult solve_p0(const PopularityVector& p, const NetworkConfig& cfg,
                     const SolverOptions& opts);

/// Exhaustive grid search; refuses instances with more than 4 files.
/// beta_grid_step = 1.0 evaluates beta = 1 only.
SolveResult grid_oracle(const PopularityVector& p, const NetworkConfig& cfg,
                        double q_grid_step, double beta_grid_step);

/// Euclidean projection onto {q in [0,1]^F : sum q <= cap} via bisection on
/// the capacity shift. Exposed for tests.
std::vector<double> project_capped_box(std::vector<double> q, double cap);

}  // namespace procache
