#pragma once

#include <span>
#include <vector>

#include "procache/types.hpp"

namespace procache {

/// Auxiliary quantities of the closed-form successful-offloading
/// probability at a given bandwidth factor.
struct SopTerms {
    double p_active = 0.0;  // BS activity probability
    double gamma0 = 0.0;    // effective SIR threshold at this beta
    double z_value = 0.0;   // interference integral Z
    double k_const = 0.0;   // Gamma-product constant K
};

/// Computes p_a, gamma0, Z and K for the given config and beta in (0,1].
/// The Z integral is evaluated to absolute error <= quad_tol.
/// Throws std::overflow_error when beta is small enough that the SIR
/// threshold exponent overflows a double.
SopTerms compute_terms(const NetworkConfig& cfg, double beta, double quad_tol = 1e-10);

/// Successful-offloading probability. q entries must be >= 0; values above
/// 1 are accepted because the Lagrangian is evaluated at raw (possibly
/// infeasible) network outputs. The capacity constraint is never required
/// here.
double sop(const PopularityVector& p, const Policy& policy, const NetworkConfig& cfg);

/// d sop / d q_f, all files. Strictly positive wherever p_f > 0.
std::vector<double> sop_grad_q(const PopularityVector& p, const Policy& policy,
                               const NetworkConfig& cfg);

/// d sop / d beta.
double sop_grad_beta(const PopularityVector& p, const Policy& policy,
                     const NetworkConfig& cfg);

// Fast paths reusing precomputed terms (one quadrature per beta, not per
// evaluation). These skip input validation.
double sop_with_terms(std::span<const double> p, std::span<const double> q, double beta,
                      const SopTerms& t, const NetworkConfig& cfg);
void sop_grad_q_with_terms(std::span<const double> p, std::span<const double> q, double beta,
                           const SopTerms& t, const NetworkConfig& cfg, std::span<double> out);
double sop_grad_beta_with_terms(std::span<const double> p, std::span<const double> q,
                                double beta, const SopTerms& t, const NetworkConfig& cfg);

/// d gamma0 / d beta at the given beta.
double dgamma0_dbeta(const NetworkConfig& cfg, double beta);

}  // namespace procache
