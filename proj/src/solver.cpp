#include "procache/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "procache/rng.hpp"

namespace procache {

namespace {

struct Point {
    std::vector<double> q;
    double beta;
};

double clampd(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Objective and gradient at a point, reusing the per-beta quadrature.
struct Eval {
    double value;
    std::vector<double> grad_q;
    double grad_beta;
};

Eval evaluate(const PopularityVector& p, const Point& x, const NetworkConfig& cfg,
              bool want_grad) {
    Eval e;
    const SopTerms t = compute_terms(cfg, x.beta);
    e.value = sop_with_terms(p.probs, x.q, x.beta, t, cfg);
    if (want_grad) {
        e.grad_q.resize(x.q.size());
        sop_grad_q_with_terms(p.probs, x.q, x.beta, t, cfg, e.grad_q);
        e.grad_beta = sop_grad_beta_with_terms(p.probs, x.q, x.beta, t, cfg);
    }
    return e;
}

}  // namespace

void SolverOptions::validate() const {
    if (max_iters < 1) throw std::invalid_argument("SolverOptions.max_iters: must be >= 1");
    if (!(tolerance > 0)) throw std::invalid_argument("SolverOptions.tolerance: must be > 0");
    if (!(step_size > 0)) throw std::invalid_argument("SolverOptions.step_size: must be > 0");
    if (restarts < 1) throw std::invalid_argument("SolverOptions.restarts: must be >= 1");
    if (!(beta_min > 0 && beta_min < 1))
        throw std::invalid_argument("SolverOptions.beta_min: must be in (0,1)");
    if (fixed_beta != 0.0 && !(fixed_beta > 0 && fixed_beta <= 1))
        throw std::invalid_argument("SolverOptions.fixed_beta: must be in (0,1]");
}

std::vector<double> project_capped_box(std::vector<double> q, double cap) {
    double clipped_sum = 0.0;
    double hi = 0.0;
    for (double& v : q) {
        hi = std::max(hi, v);
        clipped_sum += clampd(v, 0.0, 1.0);
    }
    if (clipped_sum <= cap) {
        for (double& v : q) v = clampd(v, 0.0, 1.0);
        return q;
    }
    // find shift nu with sum clamp(q - nu, 0, 1) = cap; monotone in nu
    double lo = 0.0;
    for (int it = 0; it < 100; ++it) {
        const double nu = 0.5 * (lo + hi);
        double s = 0.0;
        for (double v : q) s += clampd(v - nu, 0.0, 1.0);
        if (s > cap)
            lo = nu;
        else
            hi = nu;
    }
    const double nu = 0.5 * (lo + hi);
    for (double& v : q) v = clampd(v - nu, 0.0, 1.0);
    return q;
}

namespace {

struct RestartResult {
    Point x;
    double value;
    bool converged;
    std::size_t iterations;
};

RestartResult ascend(const PopularityVector& p, const NetworkConfig& cfg,
                     const SolverOptions& opts, Point x) {
    const double cap = static_cast<double>(cfg.cache_size_c);
    const bool beta_fixed = opts.fixed_beta > 0.0;
    const double beta_lo = beta_fixed ? opts.fixed_beta : opts.beta_min;
    const double beta_hi = beta_fixed ? opts.fixed_beta : 1.0;

    Eval cur = evaluate(p, x, cfg, true);
    RestartResult best{x, cur.value, false, 0};

    double step = opts.step_size;
    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        // backtracking ascent step with projection
        Point cand;
        Eval cand_eval;
        bool moved = false;
        for (int bt = 0; bt < 40; ++bt) {
            cand.q = x.q;
            for (std::size_t f = 0; f < cand.q.size(); ++f) cand.q[f] += step * cur.grad_q[f];
            cand.q = project_capped_box(std::move(cand.q), cap);
            cand.beta = beta_fixed ? opts.fixed_beta
                                   : clampd(x.beta + step * cur.grad_beta, beta_lo, beta_hi);
            cand_eval = evaluate(p, cand, cfg, true);
            if (cand_eval.value >= cur.value - 1e-15) {
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;  // no ascent possible at the smallest step

        // KKT residual: norm of the unit-step projected ascent direction
        double res_sq = 0.0;
        {
            std::vector<double> probe = x.q;
            for (std::size_t f = 0; f < probe.size(); ++f) probe[f] += cur.grad_q[f];
            probe = project_capped_box(std::move(probe), cap);
            for (std::size_t f = 0; f < probe.size(); ++f) {
                const double d = probe[f] - x.q[f];
                res_sq += d * d;
            }
            if (!beta_fixed) {
                const double db = clampd(x.beta + cur.grad_beta, beta_lo, beta_hi) - x.beta;
                res_sq += db * db;
            }
        }

        x = cand;
        cur = cand_eval;
        if (cur.value > best.value) {
            best.x = x;
            best.value = cur.value;
        }
        best.iterations = it + 1;
        if (std::sqrt(res_sq) <= opts.tolerance) {
            best.converged = true;
            break;
        }
        step = std::min(step * 2.0, opts.step_size);  // re-grow after successful move
    }
    if (best.value < cur.value) {
        best.x = x;
        best.value = cur.value;
    }
    return best;
}

}  // namespace

SolveResult solve_p0(const PopularityVector& p, const NetworkConfig& cfg,
                     const SolverOptions& opts) {
    p.validate();
    cfg.validate();
    opts.validate();
    if (p.size() != cfg.num_files_f)
        throw std::invalid_argument("solve_p0: popularity length differs from cfg.num_files_f");

    const std::size_t F = p.size();
    const double cap = static_cast<double>(cfg.cache_size_c);
    const bool beta_fixed = opts.fixed_beta > 0.0;

    RestartResult best;
    bool have_best = false;
    for (std::size_t r = 0; r < opts.restarts; ++r) {
        Point x0;
        x0.q.resize(F);
        if (r == 0) {
            // popularity-proportional start scaled to the capacity, clipped at 1
            double psum = 0.0;
            for (double v : p.probs) psum += v;
            for (std::size_t f = 0; f < F; ++f)
                x0.q[f] = clampd(p.probs[f] * cap / psum, 0.0, 1.0);
            x0.beta = beta_fixed ? opts.fixed_beta : 1.0;
        } else {
            Rng rng(derive_seed(opts.seed, r));
            double s = 0.0;
            for (std::size_t f = 0; f < F; ++f) {
                x0.q[f] = rng.uniform();
                s += x0.q[f];
            }
            if (s > cap)
                for (double& v : x0.q) v *= cap / s;
            x0.beta = beta_fixed ? opts.fixed_beta : rng.uniform(0.25, 1.0);
        }
        RestartResult rr = ascend(p, cfg, opts, std::move(x0));
        if (!have_best || rr.value > best.value) {  // strict: ties keep the lowest index
            best = std::move(rr);
            have_best = true;
        }
    }

    SolveResult out;
    out.policy.q = std::move(best.x.q);
    out.policy.beta = best.x.beta;
    out.achieved_sop = best.value;
    out.converged = best.converged;
    out.iterations = best.iterations;
    return out;
}

SolveResult grid_oracle(const PopularityVector& p, const NetworkConfig& cfg, double q_grid_step,
                        double beta_grid_step) {
    p.validate();
    cfg.validate();
    if (p.size() > 4)
        throw std::invalid_argument("grid_oracle: refusing instances with more than 4 files");
    if (!(q_grid_step > 0 && q_grid_step <= 1) || !(beta_grid_step > 0 && beta_grid_step <= 1))
        throw std::invalid_argument("grid_oracle: grid steps must be in (0,1]");
    if (p.size() != cfg.num_files_f)
        throw std::invalid_argument("grid_oracle: popularity length differs from cfg.num_files_f");

    const std::size_t F = p.size();
    const double cap = static_cast<double>(cfg.cache_size_c);
    const std::size_t nq = static_cast<std::size_t>(std::llround(1.0 / q_grid_step));
    const std::size_t nb = static_cast<std::size_t>(std::llround(1.0 / beta_grid_step));

    SolveResult best;
    best.achieved_sop = -1.0;
    std::vector<double> q(F, 0.0);
    std::vector<std::size_t> idx(F, 0);

    for (std::size_t bi = 1; bi <= nb; ++bi) {
        const double beta = static_cast<double>(bi) / static_cast<double>(nb);
        const SopTerms t = compute_terms(cfg, beta);
        // mixed-radix odometer over the q grid, digits 0..nq per file
        std::fill(idx.begin(), idx.end(), 0);
        for (;;) {
            double sum = 0.0;
            for (std::size_t f = 0; f < F; ++f) {
                q[f] = static_cast<double>(idx[f]) / static_cast<double>(nq);
                sum += q[f];
            }
            if (sum <= cap + 1e-12) {
                const double v = sop_with_terms(p.probs, q, beta, t, cfg);
                if (v > best.achieved_sop) {
                    best.achieved_sop = v;
                    best.policy.q = q;
                    best.policy.beta = beta;
                }
            }
            std::size_t f = 0;
            while (f < F && idx[f] == nq) {
                idx[f] = 0;
                ++f;
            }
            if (f == F) break;
            ++idx[f];
        }
    }
    best.converged = true;
    best.iterations = 0;
    return best;
}

}  // namespace procache
