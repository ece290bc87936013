#include <doctest.h>

#include <cmath>
#include <vector>

#include "procache/analytics.hpp"
#include "procache/rng.hpp"
#include "procache/special.hpp"

using namespace procache;

namespace {

NetworkConfig default_cfg(std::size_t F = 10, std::size_t C = 1) {
    NetworkConfig cfg;
    cfg.num_files_f = F;
    cfg.cache_size_c = C;
    return cfg;
}

PopularityVector zipf_pop(std::size_t F, double s) {
    PopularityVector p;
    p.probs.resize(F);
    double sum = 0.0;
    for (std::size_t f = 0; f < F; ++f) {
        p.probs[f] = std::pow(static_cast<double>(f + 1), -s);
        sum += p.probs[f];
    }
    for (double& v : p.probs) v /= sum;
    return p;
}

// Independent oracle for the Z integral: substitute x = u/(1-u) onto
// (u0, 1) and run adaptive Simpson, stopping just short of the endpoint
// singularity (the clipped tail is below 1e-10 for alpha >= 3).
double simpson(double (*f)(double, double), double alpha, double a, double b) {
    const double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a, alpha) + 4.0 * f(m, alpha) + f(b, alpha));
}

double z_integrand_u(double u, double alpha) {
    const double x = u / (1.0 - u);
    return 1.0 / ((1.0 + std::pow(x, alpha / 2.0)) * (1.0 - u) * (1.0 - u));
}

double adaptive_simpson(double (*f)(double, double), double alpha, double a, double b,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = simpson(f, alpha, a, m);
    const double right = simpson(f, alpha, m, b);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, alpha, a, m, left, tol * 0.5, depth - 1) +
           adaptive_simpson(f, alpha, m, b, right, tol * 0.5, depth - 1);
}

double z_oracle(double gamma0, double alpha) {
    const double a = std::pow(gamma0, -2.0 / alpha);
    const double u0 = a / (1.0 + a);
    const double u1 = 1.0 - 1e-12;
    const double integral = adaptive_simpson(z_integrand_u, alpha, u0, u1,
                                             simpson(z_integrand_u, alpha, u0, u1), 1e-10, 48);
    return std::pow(gamma0, 2.0 / alpha) * integral;
}

double fd_q(const PopularityVector& p, const Policy& pol, const NetworkConfig& cfg,
            std::size_t f, double h = 1e-6) {
    Policy hi = pol, lo = pol;
    hi.q[f] += h;
    lo.q[f] -= h;
    return (sop(p, hi, cfg) - sop(p, lo, cfg)) / (2.0 * h);
}

double fd_beta(const PopularityVector& p, const Policy& pol, const NetworkConfig& cfg,
               double h = 1e-6) {
    Policy hi = pol, lo = pol;
    hi.beta += h;
    lo.beta -= h;
    return (sop(p, hi, cfg) - sop(p, lo, cfg)) / (2.0 * h);
}

}  // namespace

TEST_SUITE_BEGIN("analytics");

TEST_CASE("activity probability at equal densities") {
    // 1 - (1 + 1/3.5)^-3.5 evaluated with 40-digit arithmetic
    const NetworkConfig cfg = default_cfg();
    const SopTerms t = compute_terms(cfg, 1.0);
    CHECK(t.p_active == doctest::Approx(0.5850513490191337).epsilon(1e-12));
}

TEST_CASE("sir threshold at R0/W = 0.1, equal densities, beta 1") {
    NetworkConfig cfg = default_cfg();
    cfg.bandwidth_w = 10.0;
    cfg.rate_threshold_r0 = 1.0;
    const SopTerms t = compute_terms(cfg, 1.0);
    CHECK(t.gamma0 == doctest::Approx(0.17121018121880986).epsilon(1e-12));
}

TEST_CASE("K matches the reflection-formula oracle at alpha 3.7") {
    NetworkConfig cfg = default_cfg();
    cfg.alpha = 3.7;
    const SopTerms t = compute_terms(cfg, 1.0);
    const double pi = 3.14159265358979323846;
    const double x = 1.0 - 2.0 / cfg.alpha;
    const double oracle = (2.0 / cfg.alpha) * pi / std::sin(pi * x);
    CHECK(t.k_const == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(std::fabs(t.k_const - 1.7120248472180721) < 1e-8);
}

TEST_CASE("Z at the reference threshold: bracket, oracle and frozen value") {
    NetworkConfig cfg = default_cfg();
    cfg.bandwidth_w = 10.0;
    cfg.rate_threshold_r0 = 1.0;
    const SopTerms t = compute_terms(cfg, 1.0);
    CHECK(t.gamma0 > 0.17);
    CHECK(t.z_value > 0.1);
    CHECK(t.z_value < 0.3);
    CHECK(t.z_value == doctest::Approx(z_oracle(t.gamma0, cfg.alpha)).epsilon(1e-7));
    CHECK(t.z_value == doctest::Approx(0.19155150290188407).epsilon(1e-9));
}

TEST_CASE("Z oracle agreement across thresholds and exponents") {
    NetworkConfig cfg = default_cfg();
    for (double alpha : {3.0, 3.7, 4.0, 5.5}) {
        cfg.alpha = alpha;
        for (double beta : {1.0, 0.5, 0.25, 0.05}) {
            const SopTerms t = compute_terms(cfg, beta);
            CHECK(t.z_value == doctest::Approx(z_oracle(t.gamma0, alpha)).epsilon(1e-6));
        }
    }
}

TEST_CASE("quadrature tolerance halving changes Z by less than the bound") {
    NetworkConfig cfg = default_cfg();
    for (double beta : {1.0, 0.3}) {
        const double tol = 1e-8;
        const SopTerms a = compute_terms(cfg, beta, tol);
        const SopTerms b = compute_terms(cfg, beta, tol / 2.0);
        CHECK(std::fabs(a.z_value - b.z_value) < tol);
    }
}

TEST_CASE("overflow diagnostics for tiny beta") {
    NetworkConfig cfg = default_cfg();
    CHECK_THROWS_AS(compute_terms(cfg, 1e-7), std::overflow_error);
    CHECK_THROWS_AS(compute_terms(cfg, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(compute_terms(cfg, 1.5), std::invalid_argument);
}

TEST_CASE("sop is zero when nothing is cached") {
    const NetworkConfig cfg = default_cfg(4, 2);
    const PopularityVector p = zipf_pop(4, 1.0);
    const Policy pol{std::vector<double>(4, 0.0), 1.0};
    CHECK(sop(p, pol, cfg) == 0.0);
}

TEST_CASE("sop collapses to 1/(1 + pa Z) with everything cached") {
    NetworkConfig cfg = default_cfg(5, 5);
    cfg.bandwidth_w = 10.0;
    cfg.rate_threshold_r0 = 1.0;  // R0/W = 0.1
    PopularityVector p;
    p.probs.assign(5, 0.2);
    const Policy pol{std::vector<double>(5, 1.0), 1.0};
    // frozen from the collapsed closed form at the oracle Z value
    CHECK(sop(p, pol, cfg) == doctest::Approx(0.8992260193842539).epsilon(1e-9));
    const SopTerms t = compute_terms(cfg, 1.0);
    CHECK(sop(p, pol, cfg) ==
          doctest::Approx(1.0 / (1.0 + t.p_active * t.z_value)).epsilon(1e-12));
}

TEST_CASE("single-file sop sits strictly between its q=0 and q=1 values") {
    const NetworkConfig cfg = default_cfg(1, 1);
    PopularityVector p;
    p.probs = {1.0};
    const double lo = sop(p, {{0.0}, 1.0}, cfg);
    const double mid = sop(p, {{0.5}, 1.0}, cfg);
    const double hi = sop(p, {{1.0}, 1.0}, cfg);
    CHECK(lo < mid);
    CHECK(mid < hi);
}

TEST_CASE("sop stays in [0,1] and is monotone in each q entry") {
    const NetworkConfig cfg = default_cfg(6, 2);
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        PopularityVector p = zipf_pop(6, rng.uniform(0.0, 2.0));
        Policy pol;
        pol.q.resize(6);
        for (double& v : pol.q) v = rng.uniform();
        pol.beta = rng.uniform(0.05, 1.0);
        const double base = sop(p, pol, cfg);
        CHECK(base >= 0.0);
        CHECK(base <= 1.0);
        for (std::size_t f = 0; f < 6; ++f) {
            Policy up = pol;
            up.q[f] += 1e-4;
            CHECK(sop(p, up, cfg) > base);
        }
    }
}

TEST_CASE("permutation equivariance") {
    const NetworkConfig cfg = default_cfg(5, 2);
    const PopularityVector p = zipf_pop(5, 1.3);
    Policy pol{{0.9, 0.1, 0.4, 0.7, 0.2}, 0.6};
    const double base = sop(p, pol, cfg);
    // rotate both p and q by one position
    PopularityVector p2;
    Policy pol2;
    pol2.beta = pol.beta;
    for (std::size_t f = 0; f < 5; ++f) {
        p2.probs.push_back(p.probs[(f + 1) % 5]);
        pol2.q.push_back(pol.q[(f + 1) % 5]);
    }
    CHECK(sop(p2, pol2, cfg) == doctest::Approx(base).epsilon(1e-14));
}

TEST_CASE("gradient in q matches central finite differences") {
    const NetworkConfig cfg = default_cfg(5, 2);
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        PopularityVector p = zipf_pop(5, rng.uniform(0.2, 1.8));
        Policy pol;
        pol.q.resize(5);
        for (double& v : pol.q) v = rng.uniform(0.05, 0.95);
        pol.beta = rng.uniform(0.1, 1.0);
        const auto g = sop_grad_q(p, pol, cfg);
        for (std::size_t f = 0; f < 5; ++f) {
            const double fd = fd_q(p, pol, cfg, f);
            CHECK(g[f] == doctest::Approx(fd).epsilon(1e-5));
            CHECK(g[f] > 0.0);
        }
    }
}

TEST_CASE("gradient entries vanish with popularity and share symmetry") {
    const NetworkConfig cfg = default_cfg(4, 2);
    PopularityVector p;
    p.probs = {0.5, 0.5, 0.0, 0.0};
    const Policy pol{{0.3, 0.3, 0.3, 0.3}, 0.8};
    const auto g = sop_grad_q(p, pol, cfg);
    CHECK(g[2] == 0.0);
    CHECK(g[3] == 0.0);
    CHECK(g[0] == doctest::Approx(g[1]).epsilon(1e-14));
}

TEST_CASE("gradient in beta matches central finite differences") {
    const NetworkConfig cfg = default_cfg(5, 2);
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        PopularityVector p = zipf_pop(5, rng.uniform(0.2, 1.8));
        Policy pol;
        pol.q.resize(5);
        for (double& v : pol.q) v = rng.uniform(0.05, 0.95);
        pol.beta = rng.uniform(0.1, 0.95);
        const double g = sop_grad_beta(p, pol, cfg);
        const double fd = fd_beta(p, pol, cfg);
        CHECK(g == doctest::Approx(fd).epsilon(1e-4));
    }
}

TEST_CASE("beta gradient of an uncached library is zero") {
    const NetworkConfig cfg = default_cfg(3, 1);
    const PopularityVector p = zipf_pop(3, 1.0);
    const Policy pol{std::vector<double>(3, 0.0), 0.5};
    CHECK(sop_grad_beta(p, pol, cfg) == 0.0);
}

TEST_CASE("beta gradient sign agrees with the finite-difference slope at beta 1") {
    const NetworkConfig cfg = default_cfg(1, 1);
    PopularityVector p;
    p.probs = {1.0};
    const Policy pol{{1.0}, 1.0};
    const double g = sop_grad_beta(p, pol, cfg);
    Policy lo = pol;
    lo.beta = 1.0 - 1e-6;
    const double slope = (sop(p, pol, cfg) - sop(p, lo, cfg)) / 1e-6;
    CHECK(g * slope > 0.0);
}

TEST_CASE("input validation") {
    const NetworkConfig cfg = default_cfg(2, 1);
    PopularityVector bad;
    bad.probs = {0.7, 0.7};
    CHECK_THROWS_AS(sop(bad, {{0.5, 0.5}, 1.0}, cfg), std::invalid_argument);
    PopularityVector p;
    p.probs = {0.5, 0.5};
    CHECK_THROWS_AS(sop(p, {{-0.1, 0.5}, 1.0}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(sop(p, {{0.5, 0.5}, 0.0}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(sop(p, {{0.5}, 1.0}, cfg), std::invalid_argument);
    NetworkConfig badcfg = cfg;
    badcfg.alpha = 2.0;
    CHECK_THROWS_AS(compute_terms(badcfg, 1.0), std::invalid_argument);
}

TEST_SUITE_END();
