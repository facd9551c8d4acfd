#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fracfund/quadrature.hpp"

using namespace fracfund;

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
    for (int order : {1, 2, 5, 10, 32}) {
        const int deg = 2 * order - 1;
        const double exact = (std::pow(2.0, deg + 1) - std::pow(-1.0, deg + 1)) / (deg + 1);
        const double got = quad::gauss([&](double x) { return std::pow(x, deg); }, -1.0, 2.0, order);
        CHECK(got == doctest::Approx(exact).epsilon(1e-13));
    }
}

TEST_CASE("gauss-legendre weights sum to two") {
    for (int order = 1; order <= 64; order += 7) {
        double w = 0.0;
        for (double x : quad::gauss_legendre(order).weights) w += x;
        CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("adaptive handles an endpoint singularity down to its depth limit") {
    // Bisection alone stalls near 1e-7 on x^{-1/2}; singular integrals in the
    // library go through graded panels instead.
    const auto e = quad::adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
    CHECK(e.value == doctest::Approx(2.0).epsilon(1e-7));
    double graded = 0.0;
    const auto p = quad::graded_toward(0.0, 1.0, 60);
    for (std::size_t i = 1; i < p.size(); ++i) {
        graded += quad::gauss([](double x) { return 1.0 / std::sqrt(x); }, p[i - 1], p[i], 20);
    }
    CHECK(graded == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("adaptive terminates on an integrand vanishing to all orders at an endpoint") {
    const auto f = [](double r) { return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0; };
    const auto e = quad::adaptive(f, 0.0, 1.0, 1e-13);
    CHECK(e.value == doctest::Approx(0.2219969080840397).epsilon(1e-11));
}

TEST_CASE("graded panels end at b and shrink toward a") {
    const auto p = quad::graded_toward(0.0, 1.0, 5);
    REQUIRE(p.size() >= 2);
    CHECK(p.back() == 1.0);
    for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] > p[i - 1]);
}

TEST_CASE("box rules agree with a separable closed form") {
    const double lo[] = {0.0, 0.0, 0.0};
    const double hi[] = {1.0, 2.0, 0.5};
    const auto f = [](std::span<const double> x) { return std::exp(x[0]) * std::cos(x[1]) * x[2]; };
    const double exact = (std::numbers::e - 1.0) * std::sin(2.0) * 0.125;
    CHECK(quad::box_gauss(f, lo, hi, 12) == doctest::Approx(exact).epsilon(1e-12));
    CHECK(quad::box_adaptive(f, lo, hi, 1e-12) == doctest::Approx(exact).epsilon(1e-11));
}
