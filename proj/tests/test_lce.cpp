#include <doctest.h>

#include <cmath>
#include <random>

#include "qcp/lce.hpp"

using namespace qcp;

TEST_CASE("single-site susceptibility")
{
    for (double g : {0.5, 1.0, 2.0}) {
        CHECK(chain_susceptibility_linear(3.0, g, 1) == doctest::Approx(4.0 / g).epsilon(1e-14));
        const ChainSusceptibility c = chain_susceptibility_extensive(3.0, g, 1);
        CHECK(c.value == doctest::Approx(4.0 / g).epsilon(1e-4));
        CHECK(c.linear);
    }
}

TEST_CASE("linear response agrees with finite differences")
{
    for (double om : {0.5, 2.0, 6.0})
        for (int ell = 2; ell <= 5; ++ell) {
            const double lin = chain_susceptibility_linear(om, 1.0, ell);
            const ChainSusceptibility fd = chain_susceptibility_extensive(om, 1.0, ell);
            CHECK(fd.value == doctest::Approx(lin).epsilon(1e-5));
        }
    CHECK_THROWS(chain_susceptibility_extensive(1.0, 1.0, 13));
    CHECK_THROWS(chain_susceptibility_extensive(1.0, 1.0, 2, 0.1));
}

TEST_CASE("weights")
{
    std::mt19937 g(4);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> p(10);
    for (double& x : p) x = u(g);
    const auto a = weights_inclusion_exclusion(p);
    const auto b = weights_second_difference(p);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));

    // An extensive quantity P(L) = c0 + c1 L has only one- and two-site weights.
    std::vector<double> lin;
    for (int L = 1; L <= 8; ++L) lin.push_back(0.3 + 1.7 * L);
    const WeightSeries ws = weights_from_values(1.0, 1.0, lin);
    CHECK(ws.weights[0] == doctest::Approx(2.0));
    CHECK(ws.weights[1] == doctest::Approx(-0.3));
    for (int L = 3; L <= 8; ++L) CHECK(std::abs(ws.weights[L - 1]) < 1e-12);
    CHECK(ws.partial_sums.back() == doctest::Approx(1.7));
    CHECK(ws.recursion_mismatch < 1e-12);
}

TEST_CASE("computed weights")
{
    const WeightSeries lr = compute_weights(2.0, 1.0, 5, 1e-3, SusceptibilityMethod::linear_response, 2);
    const WeightSeries fd = compute_weights(2.0, 1.0, 5);
    CHECK(lr.weights[0] == doctest::Approx(4.0));
    for (int L = 1; L <= 5; ++L) {
        CHECK(fd.weights[L - 1] == doctest::Approx(lr.weights[L - 1]).epsilon(1e-4));
        CHECK((lr.weights[L - 1] > 0) == (L % 2 == 1));
        CHECK(fd.linear_ok[L - 1]);
    }
}

TEST_CASE("tails")
{
    const ExpFit e{0.9, 0.35};
    const PowerFit pw{1.2, 1.8};
    for (int R : {3, 8}) {
        double se = 0.0, sp = 0.0;
        for (int L = 200000; L > R; --L) {
            const double s = L % 2 ? 1.0 : -1.0;
            se += s * e.a * std::exp(-e.b * L);
            sp += s * pw.c * std::pow(L, -pw.n);
        }
        CHECK(tail_exponential(e, R) == doctest::Approx(se).epsilon(1e-10));
        CHECK(tail_power(pw, R) == doctest::Approx(sp).epsilon(1e-6));
    }
}

TEST_CASE("extrapolation of exact alternating laws")
{
    std::vector<double> w;
    for (int L = 1; L <= 9; ++L) w.push_back((L % 2 ? 1.0 : -1.0) * 2.0 * std::exp(-0.4 * L));
    std::vector<double> p(w.size());
    // Invert the second difference to get chain values with these weights.
    for (std::size_t i = 0; i < w.size(); ++i)
        p[i] = w[i] + (i >= 1 ? 2.0 * p[i - 1] : 0.0) - (i >= 2 ? p[i - 2] : 0.0);
    const WeightSeries ws = weights_from_values(1.0, 1.0, p);
    const double exact = 2.0 / (1.0 + std::exp(0.4));
    for (FitMethod m : {FitMethod::two_point, FitMethod::least_squares}) {
        ExtrapolationOptions opt;
        opt.method = m;
        const ChiExtrapolation x = extrapolate_chi(ws, opt);
        CHECK(x.regime == Regime::exponential);
        CHECK(x.alternating);
        CHECK(x.extrapolable);
        CHECK(x.exp_fit.b == doctest::Approx(0.4).epsilon(1e-8));
        CHECK(x.chi_tdl == doctest::Approx(exact).epsilon(1e-8));
    }

    WeightSeries big = ws;
    big.omega = 7.0;
    const ChiExtrapolation y = extrapolate_chi(big);
    CHECK(y.regime == Regime::power_law);
    CHECK(to_string(y.regime) == "power_law");

    WeightSeries bad = ws;
    bad.weights[3] = -bad.weights[3];
    const ChiExtrapolation z = extrapolate_chi(bad);
    CHECK_FALSE(z.alternating);
    CHECK_FALSE(z.extrapolable);
    CHECK(z.chi_tdl == z.partial_sum);
}

namespace {

// Dense null vector of the Liouvillian of H = H_chain + h sum_j sigma^x_j,
// assembled from Kronecker products: vec(A X B) = (B^T kron A) vec(X).
double dense_sigma_y_total(double omega, int ell, double h)
{
    ModelParams p;
    p.L = ell;
    p.omega = omega;
    const Index n = p.dim();
    Eigen::MatrixXcd H = build_hamiltonian(p).to_dense();
    Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 0; j < ell; ++j) {
        H += h * site_operator(ell, j, SiteOp::sigma_x).to_dense();
        Y += site_operator(ell, j, SiteOp::sigma_y).to_dense();
    }
    const auto kron = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
        Eigen::MatrixXcd k(a.rows() * b.rows(), a.cols() * b.cols());
        for (Index i = 0; i < a.rows(); ++i)
            for (Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        return k;
    };
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    const cplx im(0.0, 1.0);
    Eigen::MatrixXcd Lm = -im * (kron(I, H) - kron(H.transpose(), I));
    for (int j = 0; j < ell; ++j) {
        const Eigen::MatrixXcd s = site_operator(ell, j, SiteOp::sigma_minus).to_dense();
        const Eigen::MatrixXcd nn = s.adjoint() * s;
        Lm += kron(s.conjugate(), s) - 0.5 * kron(I, nn) - 0.5 * kron(nn.transpose(), I);
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(Lm);
    const Eigen::MatrixXcd ker = lu.kernel();
    REQUIRE(ker.cols() == 1);
    Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(ker.data(), n, n);
    rho /= rho.trace();
    return (rho * Y).trace().real();
}

} // namespace

TEST_CASE("two-site susceptibility against a dense null-space solve")
{
    const double h = 1e-4;
    const double dense = (dense_sigma_y_total(2.0, 2, h) - dense_sigma_y_total(2.0, 2, -h)) / (2.0 * h);
    CHECK(chain_susceptibility_extensive(2.0, 1.0, 2, h).value == doctest::Approx(dense).epsilon(1e-7));
    CHECK(chain_susceptibility_linear(2.0, 1.0, 2) == doctest::Approx(dense).epsilon(1e-7));
    CHECK(std::abs(dense_sigma_y_total(2.0, 2, 0.0)) < 1e-14);
}
