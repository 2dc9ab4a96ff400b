#include "qcp/fitting.hpp"

#include <cmath>
#include <vector>

namespace qcp {

LinearFit linfit(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size()) throw std::invalid_argument("linfit: length mismatch");
    const auto n = static_cast<Index>(xs.size());
    if (n < 2) throw std::invalid_argument("linfit: need at least two points");
    const Eigen::Map<const Eigen::VectorXd> x(xs.data(), n), y(ys.data(), n);
    const double xm = x.mean(), ym = y.mean();
    const double sxx = (x.array() - xm).square().sum();
    if (!(sxx > 0.0)) throw std::invalid_argument("linfit: degenerate abscissae");
    const double sxy = ((x.array() - xm) * (y.array() - ym)).sum();

    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = ym - f.slope * xm;
    const Eigen::ArrayXd res = y.array() - (f.slope * x.array() + f.intercept);
    const double ss = res.square().sum();
    f.residual_rms = std::sqrt(ss / n);
    if (n > 2) {
        const double s2 = ss / (n - 2);
        f.slope_stderr = std::sqrt(s2 / sxx);
        f.intercept_stderr = std::sqrt(s2 * (1.0 / n + xm * xm / sxx));
    }
    return f;
}

ExpFit two_point_exp_fit(double L1, double w1, double L2, double w2)
{
    if (w1 == 0.0 || w2 == 0.0) throw std::invalid_argument("two_point_exp_fit: zero weight");
    if (L1 == L2) throw std::invalid_argument("two_point_exp_fit: identical sizes");
    ExpFit f;
    f.b = std::log(std::abs(w1) / std::abs(w2)) / (L2 - L1);
    f.a = std::abs(w1) * std::exp(f.b * L1);
    return f;
}

PowerFit two_point_power_fit(double L1, double w1, double L2, double w2)
{
    if (w1 == 0.0 || w2 == 0.0) throw std::invalid_argument("two_point_power_fit: zero weight");
    if (L1 <= 0.0 || L2 <= 0.0 || L1 == L2) throw std::invalid_argument("two_point_power_fit: bad sizes");
    PowerFit f;
    f.n = std::log(std::abs(w1) / std::abs(w2)) / std::log(L2 / L1);
    f.c = std::abs(w1) * std::pow(L1, f.n);
    return f;
}

namespace {

std::vector<double> log_abs(std::span<const double> ws)
{
    std::vector<double> out;
    for (double w : ws) {
        if (w == 0.0) throw std::invalid_argument("log fit: zero weight");
        out.push_back(std::log(std::abs(w)));
    }
    return out;
}

} // namespace

ExpFit lsq_exp_fit(std::span<const double> Ls, std::span<const double> ws)
{
    const auto lw = log_abs(ws);
    const LinearFit f = linfit(Ls, lw);
    return {std::exp(f.intercept), -f.slope};
}

PowerFit lsq_power_fit(std::span<const double> Ls, std::span<const double> ws)
{
    const auto lw = log_abs(ws);
    std::vector<double> lL;
    for (double L : Ls) lL.push_back(std::log(L));
    const LinearFit f = linfit(lL, lw);
    return {std::exp(f.intercept), -f.slope};
}

double eta(double s)
{
    if (!(s > 0.0)) throw std::domain_error("eta: argument must be positive");
    // Cohen, Rodriguez Villegas and Zagier, algorithm 1.
    constexpr int n = 30;
    const double d0 = std::pow(3.0 + std::sqrt(8.0), n);
    const double d = 0.5 * (d0 + 1.0 / d0);
    double b = -1.0, c = -d, sum = 0.0;
    for (int k = 0; k < n; ++k) {
        c = b - c;
        sum += c * std::pow(k + 1.0, -s);
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0));
    }
    return sum / d;
}

double zeta(double s)
{
    if (!(s > 1.0)) throw std::domain_error("zeta: argument must exceed 1");
    return eta(s) / (1.0 - std::pow(2.0, 1.0 - s));
}

double central_difference(const std::function<double(double)>& f, double x, double h)
{
    if (!(h > 0.0)) throw std::invalid_argument("central_difference: step must be positive");
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

} // namespace qcp
