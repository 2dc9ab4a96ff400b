#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qcp/fitting.hpp"

using namespace qcp;

TEST_CASE("linear fit")
{
    const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    const LinearFit f = linfit(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.residual_rms < 1e-14);
    CHECK(f.slope_stderr < 1e-14);

    const std::vector<double> yn{0, 1, 0, 1};
    const LinearFit g = linfit(x, yn);
    CHECK(g.slope == doctest::Approx(0.2));
    CHECK(g.slope_stderr == doctest::Approx(std::sqrt(0.4 / 5.0)));

    CHECK_THROWS(linfit(std::vector<double>{1}, std::vector<double>{1}));
    CHECK_THROWS(linfit(std::vector<double>{2, 2}, std::vector<double>{1, 3}));
    CHECK_THROWS(linfit(std::vector<double>{1, 2}, std::vector<double>{1}));
}

TEST_CASE("two point fits recover exact laws")
{
    const ExpFit e = two_point_exp_fit(5, 0.3 * std::exp(-0.7 * 5), 6, -0.3 * std::exp(-0.7 * 6));
    CHECK(e.a == doctest::Approx(0.3));
    CHECK(e.b == doctest::Approx(0.7));
    const PowerFit p = two_point_power_fit(7, -2.0 * std::pow(7.0, -2.5), 8, 2.0 * std::pow(8.0, -2.5));
    CHECK(p.c == doctest::Approx(2.0));
    CHECK(p.n == doctest::Approx(2.5));
    CHECK_THROWS(two_point_exp_fit(1, 0.0, 2, 1.0));
    CHECK_THROWS(two_point_power_fit(0, 1.0, 2, 1.0));
}

TEST_CASE("least squares fits recover exact laws")
{
    std::vector<double> L, we, wp;
    for (int k = 3; k <= 9; ++k) {
        L.push_back(k);
        we.push_back((k % 2 ? 1 : -1) * 1.5 * std::exp(-0.4 * k));
        wp.push_back((k % 2 ? 1 : -1) * 0.8 * std::pow(k, -1.7));
    }
    const ExpFit e = lsq_exp_fit(L, we);
    CHECK(e.a == doctest::Approx(1.5));
    CHECK(e.b == doctest::Approx(0.4));
    const PowerFit p = lsq_power_fit(L, wp);
    CHECK(p.c == doctest::Approx(0.8));
    CHECK(p.n == doctest::Approx(1.7));
}

TEST_CASE("eta and zeta")
{
    CHECK(eta(1.0) == doctest::Approx(std::numbers::ln2).epsilon(1e-14));
    CHECK(eta(2.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 12.0).epsilon(1e-14));
    CHECK(zeta(2.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-14));
    CHECK(zeta(4.0) == doctest::Approx(std::pow(std::numbers::pi, 4) / 90.0).epsilon(1e-14));
    for (double s : {0.5, 1.3, 2.7, 6.0}) {
        // Partial sums of the alternating series bracket the limit; averaging
        // two consecutive ones gives an independent estimate.
        double a = 0.0, b = 0.0;
        const int n = 200000;
        for (int k = 1; k <= n; ++k) a += (k % 2 ? 1.0 : -1.0) * std::pow(k, -s);
        b = a + (n % 2 ? -1.0 : 1.0) * std::pow(n + 1.0, -s);
        CHECK(eta(s) == doctest::Approx(0.5 * (a + b)).epsilon(1e-8));
    }
    for (double s : {1.5, 3.0, 7.5}) CHECK(zeta(s) == doctest::Approx(std::riemann_zeta(s)).epsilon(1e-13));
    CHECK_THROWS(eta(0.0));
    CHECK_THROWS(zeta(1.0));
}

TEST_CASE("central difference")
{
    CHECK(central_difference([](double x) { return x * x * x; }, 2.0, 1e-3) == doctest::Approx(12.000001));
    CHECK_THROWS(central_difference([](double x) { return x; }, 0.0, 0.0));
}
