#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace procache {

/// Scenario constants. Defaults mirror a dense urban deployment with
/// equal BS and user densities (disc of radius 250 m holding 5 nodes).
struct NetworkConfig {
    double lambda_b = 5.0 / (250.0 * 250.0 * 3.14159265358979323846);  // BS density, m^-2
    double lambda_u = 5.0 / (250.0 * 250.0 * 3.14159265358979323846);  // user density, m^-2
    double bandwidth_w = 20e6;        // total bandwidth, Hz
    double rate_threshold_r0 = 2e6;   // rate threshold, bit/s
    double alpha = 3.7;               // path-loss exponent, > 2
    // Transmit power cancels out of the SIR (every BS transmits at the same
    // power and the per-user split divides signal and interference alike).
    // Recorded for scenario fidelity only.
    double tx_power_dbm = 30.0;
    std::size_t num_files_f = 20;     // library size
    std::size_t cache_size_c = 2;     // per-BS cache capacity, files
    std::size_t window_tau = 5;       // observation window length, periods

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Per-period file request probabilities. Entries in [0,1], sum 1.
struct PopularityVector {
    std::vector<double> probs;

    std::size_t size() const { return probs.size(); }
    bool is_valid(double tol = 1e-9) const;
    void validate(double tol = 1e-9) const;
};

/// Decision variables: caching probabilities q plus bandwidth factor beta.
struct Policy {
    std::vector<double> q;
    double beta = 1.0;

    /// Box + capacity feasibility: q in [0,1]^F, sum q <= C, 0 < beta <= 1.
    bool is_feasible(std::size_t cache_size_c, double tol = 1e-9) const;
    void validate_feasible(std::size_t cache_size_c, double tol = 1e-9) const;
};

/// tau stacked past popularity vectors, newest period first.
struct HistoryWindow {
    std::vector<std::vector<double>> rows;  // rows[0] = most recent period

    std::size_t tau() const { return rows.size(); }
    std::size_t num_files() const { return rows.empty() ? 0 : rows.front().size(); }
    std::vector<double> flatten() const;
    /// Rows come from renormalized estimates; tolerance is looser than for
    /// PopularityVector.
    bool is_valid(double tol = 1e-6) const;
    void validate(double tol = 1e-6) const;
};

/// One (target popularity, history) realization.
struct TrainingSample {
    PopularityVector target;
    HistoryWindow history;

    std::size_t num_files() const { return target.size(); }
    void validate() const;
};

/// Lagrange multipliers: xi_c for the capacity constraint, xi_f per file
/// for q_f <= 1.
struct MultiplierSet {
    double xi_c = 0.0;
    std::vector<double> xi_f;

    void validate() const;
};

}  // namespace procache
