#include "procache/special.hpp"

#include <cmath>
#include <stdexcept>

namespace procache {

double gamma_fn(double x) {
    if (!std::isfinite(x) || x <= 0.0)
        throw std::domain_error("gamma_fn: argument must be a positive real");

    // Lanczos, g = 7, 9 coefficients.
    static const double g = 7.0;
    static const double c[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7};

    if (x < 0.5) {
        // reflection; safe here since 0 < x < 0.5 keeps sin(pi x) > 0
        const double pi = 3.14159265358979323846;
        return pi / (std::sin(pi * x) * gamma_fn(1.0 - x));
    }
    const double z = x - 1.0;
    double a = c[0];
    for (int i = 1; i < 9; ++i) a += c[i] / (z + static_cast<double>(i));
    const double t = z + g + 0.5;
    const double sqrt_two_pi = 2.5066282746310002;
    return sqrt_two_pi * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

}  // namespace procache
