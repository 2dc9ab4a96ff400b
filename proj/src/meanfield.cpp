#include "qcp/meanfield.hpp"

#include <algorithm>
#include <cmath>

namespace qcp {

std::string to_string(MfBranch b)
{
    switch (b) {
    case MfBranch::absorbing: return "absorbing";
    case MfBranch::active_plus: return "active_plus";
    case MfBranch::active_minus: return "active_minus";
    }
    return "unknown";
}

BlochState mf_rhs(const BlochState& s, double omega, double gamma)
{
    const double x = s.x(), y = s.y(), z = s.z();
    return {-2.0 * omega * x * y - 0.5 * gamma * x,
            2.0 * omega * x * x - 2.0 * omega * (1.0 + z) * z - 0.5 * gamma * y,
            2.0 * omega * (1.0 + z) * y - gamma * (1.0 + z)};
}

Eigen::Matrix3d mf_jacobian(const BlochState& s, double omega, double gamma)
{
    const double x = s.x(), y = s.y(), z = s.z();
    Eigen::Matrix3d m;
    m << -2.0 * omega * y - 0.5 * gamma, -2.0 * omega * x, 0.0,
        4.0 * omega * x, -0.5 * gamma, -2.0 * omega * (2.0 * z + 1.0),
        0.0, 2.0 * omega * (z + 1.0), 2.0 * omega * y - gamma;
    return m;
}

double mf_max_re_lambda(const BlochState& s, double omega, double gamma)
{
    const Eigen::EigenSolver<Eigen::Matrix3d> es(mf_jacobian(s, omega, gamma), false);
    return es.eigenvalues().real().maxCoeff();
}

namespace {

MfFixedPoint classify(const BlochState& s, MfBranch b, double omega, double gamma)
{
    MfFixedPoint p;
    p.state = s;
    p.branch = b;
    p.max_re_lambda = mf_max_re_lambda(s, omega, gamma);
    p.stable = p.max_re_lambda < -kMarginalTol;
    return p;
}

} // namespace

std::vector<MfFixedPoint> mf_steady_states(double omega, double gamma)
{
    if (!(omega >= 0.0) || !(gamma > 0.0)) throw std::invalid_argument("mf_steady_states: bad rates");
    std::vector<MfFixedPoint> out;
    out.push_back(classify({0.0, 0.0, -1.0}, MfBranch::absorbing, omega, gamma));
    if (omega < gamma / std::sqrt(2.0)) return out;

    const double disc = std::max(0.0, 1.0 - gamma * gamma / (2.0 * omega * omega));
    const double root = 0.5 * std::sqrt(disc);
    const double y = gamma / (2.0 * omega);
    out.push_back(classify({0.0, y, -0.5 + root}, MfBranch::active_plus, omega, gamma));
    out.push_back(classify({0.0, y, -0.5 - root}, MfBranch::active_minus, omega, gamma));
    return out;
}

std::vector<MfScanRow> mf_branch_scan(const std::vector<double>& omega_grid, double gamma)
{
    if (!std::is_sorted(omega_grid.begin(), omega_grid.end()))
        throw std::invalid_argument("mf_branch_scan: grid must be sorted ascending");
    std::vector<MfScanRow> rows;
    for (double w : omega_grid)
        for (const auto& p : mf_steady_states(w, gamma)) rows.push_back({w, p});
    return rows;
}

BlochState mf_integrate(BlochState s, double omega, double gamma, double t_max, double dt)
{
    const auto steps = static_cast<long>(std::ceil(t_max / dt));
    const double h = t_max / static_cast<double>(steps);
    for (long i = 0; i < steps; ++i) {
        const BlochState k1 = mf_rhs(s, omega, gamma);
        const BlochState k2 = mf_rhs(s + 0.5 * h * k1, omega, gamma);
        const BlochState k3 = mf_rhs(s + 0.5 * h * k2, omega, gamma);
        const BlochState k4 = mf_rhs(s + h * k3, omega, gamma);
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return s;
}

} // namespace qcp
