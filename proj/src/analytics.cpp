#include "procache/analytics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "procache/special.hpp"

namespace procache {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kMaxExp2 = 1020.0;  // 2^x representable margin

double sir_exponent(const NetworkConfig& cfg, double beta) {
    return cfg.rate_threshold_r0 / (beta * cfg.bandwidth_w) *
           (1.0 + 1.28 * cfg.lambda_u / cfg.lambda_b);
}

void check_beta(double beta) {
    if (!(std::isfinite(beta) && beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("beta must be in (0,1]");
}

void check_q(std::span<const double> q) {
    for (double v : q)
        if (!(std::isfinite(v) && v >= 0.0))
            throw std::invalid_argument("q entries must be finite and >= 0");
}

void check_pair(const PopularityVector& p, const Policy& policy) {
    p.validate();
    check_beta(policy.beta);
    check_q(policy.q);
    if (p.size() != policy.q.size())
        throw std::invalid_argument("p and q dimensions disagree");
}

// Z = gamma^{2/a} * int_{gamma^{-2/a}}^inf dx/(1+x^{a/2}).
// Substituting x = t^{-2/a} and then t = v^{a/(a-2)} gives the smooth
// finite-domain form
//   Z = gamma^{2/a} * (2/(a-2)) * int_0^{gamma^{1-2/a}} dv/(1+v^{a/(a-2)}),
// and the [8, V] part of the range is summed exactly as an alternating
// power series so the quadrature always runs on a short smooth interval.
double z_integral(double gamma0, double alpha, double quad_tol) {
    const double m = alpha / (alpha - 2.0);
    const double v_end = std::pow(gamma0, 1.0 - 2.0 / alpha);
    const double v_cut = 8.0;
    auto integrand = [m](double v) { return 1.0 / (1.0 + std::pow(v, m)); };

    double core;
    if (v_end <= v_cut) {
        core = integrate_adaptive(integrand, 0.0, v_end, quad_tol);
    } else {
        // tail(X) = int_X^inf dv/(1+v^m) = sum_k (-1)^{k+1} X^{1-mk}/(mk-1)
        auto tail = [m](double x) {
            double sum = 0.0;
            double sign = 1.0;
            for (int k = 1; k < 200; ++k) {
                const double e = m * static_cast<double>(k);
                const double term = std::pow(x, 1.0 - e) / (e - 1.0);
                sum += sign * term;
                if (term < 1e-16 * std::fabs(sum)) break;
                sign = -sign;
            }
            return sum;
        };
        core = integrate_adaptive(integrand, 0.0, v_cut, quad_tol) + tail(v_cut) - tail(v_end);
    }
    return std::pow(gamma0, 2.0 / alpha) * (2.0 / (alpha - 2.0)) * core;
}

double kappa(double qf, double beta, const SopTerms& t, double g2a) {
    return qf + t.p_active * beta * (qf * t.z_value + t.k_const * (1.0 - qf) * g2a);
}

}  // namespace

SopTerms compute_terms(const NetworkConfig& cfg, double beta, double quad_tol) {
    cfg.validate();
    check_beta(beta);

    SopTerms t;
    const double ratio = cfg.lambda_u / cfg.lambda_b;
    t.p_active = 1.0 - std::pow(1.0 + ratio / 3.5, -3.5);

    const double e = sir_exponent(cfg, beta);
    if (e > kMaxExp2)
        throw std::overflow_error(
            "compute_terms: SIR threshold exponent 2^" + std::to_string(e) +
            " overflows at beta=" + std::to_string(beta) + "; increase beta or bandwidth");
    t.gamma0 = std::exp2(e) - 1.0;

    t.k_const = gamma_fn(1.0 - 2.0 / cfg.alpha) * gamma_fn(1.0 + 2.0 / cfg.alpha) / gamma_fn(1.0);
    t.z_value = z_integral(t.gamma0, cfg.alpha, quad_tol);
    return t;
}

double sop_with_terms(std::span<const double> p, std::span<const double> q, double beta,
                      const SopTerms& t, const NetworkConfig& cfg) {
    const double g2a = std::pow(t.gamma0, 2.0 / cfg.alpha);
    double sum = 0.0;
    for (std::size_t f = 0; f < p.size(); ++f) {
        if (q[f] == 0.0) continue;  // term is exactly 0
        sum += p[f] * q[f] / kappa(q[f], beta, t, g2a);
    }
    return sum;
}

void sop_grad_q_with_terms(std::span<const double> p, std::span<const double> q, double beta,
                           const SopTerms& t, const NetworkConfig& cfg, std::span<double> out) {
    const double g2a = std::pow(t.gamma0, 2.0 / cfg.alpha);
    const double num = t.k_const * t.p_active * beta * g2a;
    for (std::size_t f = 0; f < p.size(); ++f) {
        const double k = kappa(q[f], beta, t, g2a);
        out[f] = num * p[f] / (k * k);
    }
}

double sop_grad_beta_with_terms(std::span<const double> p, std::span<const double> q,
                                double beta, const SopTerms& t, const NetworkConfig& cfg) {
    const double g2a = std::pow(t.gamma0, 2.0 / cfg.alpha);
    const double dgdb = dgamma0_dbeta(cfg, beta);
    // dZ/dbeta = (2/a) dgamma/dbeta (Z/gamma + 1/(1+gamma))
    const double dzdb = (2.0 / cfg.alpha) * dgdb *
                        (t.z_value / t.gamma0 + 1.0 / (1.0 + t.gamma0));
    double sum = 0.0;
    for (std::size_t f = 0; f < p.size(); ++f) {
        if (q[f] == 0.0) continue;
        const double k = kappa(q[f], beta, t, g2a);
        const double bracket =
            q[f] * (t.z_value + beta * dzdb) +
            t.k_const * (1.0 - q[f]) * g2a * (1.0 + (2.0 / cfg.alpha) * beta * dgdb / t.gamma0);
        sum += t.p_active * p[f] * q[f] / (k * k) * bracket;
    }
    return -sum;
}

double sop(const PopularityVector& p, const Policy& policy, const NetworkConfig& cfg) {
    check_pair(p, policy);
    const SopTerms t = compute_terms(cfg, policy.beta);
    return sop_with_terms(p.probs, policy.q, policy.beta, t, cfg);
}

std::vector<double> sop_grad_q(const PopularityVector& p, const Policy& policy,
                               const NetworkConfig& cfg) {
    check_pair(p, policy);
    const SopTerms t = compute_terms(cfg, policy.beta);
    std::vector<double> out(p.size());
    sop_grad_q_with_terms(p.probs, policy.q, policy.beta, t, cfg, out);
    return out;
}

double sop_grad_beta(const PopularityVector& p, const Policy& policy, const NetworkConfig& cfg) {
    check_pair(p, policy);
    const SopTerms t = compute_terms(cfg, policy.beta);
    return sop_grad_beta_with_terms(p.probs, policy.q, policy.beta, t, cfg);
}

double dgamma0_dbeta(const NetworkConfig& cfg, double beta) {
    const double e = sir_exponent(cfg, beta);
    // d/dbeta [2^{c/beta} - 1] = -(c/beta^2) 2^{c/beta} ln 2, with c/beta = e
    return -(e / beta) * std::exp2(e) * kLn2;
}

}  // namespace procache
