#include <doctest.h>

#include <cmath>

#include "procache/special.hpp"

using namespace procache;

TEST_SUITE_BEGIN("special");

TEST_CASE("gamma at known points") {
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(3.14159265358979323846)).epsilon(1e-10));
    CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-10));
}

TEST_CASE("gamma recurrence and reflection") {
    // Gamma(x+1) = x Gamma(x) across the range used by K
    for (double x : {0.1, 0.3, 0.459459, 0.7, 1.2, 2.5, 4.9}) {
        CHECK(gamma_fn(x + 1.0) == doctest::Approx(x * gamma_fn(x)).epsilon(1e-11));
    }
    // Gamma(x) Gamma(1-x) = pi / sin(pi x)
    const double pi = 3.14159265358979323846;
    for (double x : {0.1, 0.25, 0.459459459459, 0.49}) {
        CHECK(gamma_fn(x) * gamma_fn(1.0 - x) ==
              doctest::Approx(pi / std::sin(pi * x)).epsilon(1e-11));
    }
}

TEST_CASE("gamma rejects non-positive arguments") {
    CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(-1.5), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(std::nan("")), std::domain_error);
}

TEST_CASE("adaptive quadrature on known integrals") {
    // int_0^1 x^2 = 1/3
    CHECK(integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0, 1e-12) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    // int_0^pi sin = 2
    CHECK(integrate_adaptive([](double x) { return std::sin(x); }, 0.0,
                             3.14159265358979323846, 1e-12) ==
          doctest::Approx(2.0).epsilon(1e-12));
    // int_1^inf 1/(1+x^2) = pi/4 via the arctan antiderivative, finite domain
    CHECK(integrate_adaptive([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0, 1e-12) ==
          doctest::Approx(3.14159265358979323846 / 4.0).epsilon(1e-12));
}

TEST_CASE("empty or inverted interval integrates to zero") {
    CHECK(integrate_adaptive([](double x) { return x; }, 1.0, 1.0, 1e-10) == 0.0);
    CHECK(integrate_adaptive([](double x) { return x; }, 2.0, 1.0, 1e-10) == 0.0);
}

TEST_SUITE_END();
