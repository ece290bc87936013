#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace procache {

/// Gamma function for x > 0 (Lanczos approximation, relative error ~1e-13).
/// Throws std::domain_error for x <= 0 or non-finite x.
double gamma_fn(double x);

namespace detail {

// Gauss-Kronrod 7-15 rule on [a,b]: returns (estimate, error estimate).
template <class F>
std::pair<double, double> gk15(const F& f, double a, double b) {
    // Kronrod abscissae (positive half) and weights; Gauss-7 weights on the
    // shared nodes.
    static const double xk[8] = {
        0.0,
        0.2077849550078985, 0.4058451513773972, 0.5860872354676911,
        0.7415311855993945, 0.8648644233597691, 0.9491079123427585,
        0.9914553711208126};
    static const double wk[8] = {
        0.2094821410847278,
        0.2044329400752989, 0.1903505780647854, 0.1690047266392679,
        0.1406532597155259, 0.1047900103222502, 0.0630920926299786,
        0.0229353220105292};
    static const double wg[4] = {
        0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
        0.1294849661688697};

    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(mid);
    double k = wk[0] * f0;
    double g = wg[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * xk[i];
        const double fv = f(mid + dx) + f(mid - dx);
        k += wk[i] * fv;
        if (i % 2 == 0) g += wg[i / 2] * fv;
    }
    k *= half;
    g *= half;
    const double err = std::fabs(k - g);
    return {k, err};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over the finite interval [a,b]
/// to absolute tolerance abs_tol. Bisects the worst interval first via a
/// simple stack; throws std::runtime_error if the panel budget is exhausted
/// before the tolerance is met.
template <class F>
double integrate_adaptive(const F& f, double a, double b, double abs_tol,
                          std::size_t max_panels = 4096) {
    if (!(b > a)) return 0.0;
    struct Seg { double a, b, val, err; };
    std::vector<Seg> segs;
    auto [v0, e0] = detail::gk15(f, a, b);
    segs.push_back({a, b, v0, e0});
    double total_err = e0;
    while (total_err > abs_tol) {
        if (segs.size() >= max_panels)
            throw std::runtime_error("integrate_adaptive: panel budget exhausted");
        // split the segment with the largest error estimate
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].err > segs[worst].err) worst = i;
        Seg s = segs[worst];
        const double mid = 0.5 * (s.a + s.b);
        if (mid <= s.a || mid >= s.b)
            throw std::runtime_error("integrate_adaptive: interval collapsed below tolerance");
        auto [vl, el] = detail::gk15(f, s.a, mid);
        auto [vr, er] = detail::gk15(f, mid, s.b);
        total_err += el + er - s.err;
        segs[worst] = {s.a, mid, vl, el};
        segs.push_back({mid, s.b, vr, er});
    }
    double sum = 0.0;
    for (const auto& s : segs) sum += s.val;
    return sum;
}

}  // namespace procache
