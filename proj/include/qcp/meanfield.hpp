#pragma once

// Single-site mean-field theory: the Bloch flow with coordination number 2,
// its fixed points and their linear stability.

#include <string>
#include <vector>

#include "qcp/types.hpp"

namespace qcp {

/// (<sigma^x>, <sigma^y>, <sigma^z>)
using BlochState = Eigen::Vector3d;

inline double bloch_population(const BlochState& s) { return 0.5 * (1.0 + s.z()); }

enum class MfBranch { absorbing, active_plus, active_minus };

std::string to_string(MfBranch b);

struct MfFixedPoint {
    BlochState state;
    MfBranch branch = MfBranch::absorbing;
    double max_re_lambda = 0.0;
    bool stable = false;
};

/// Jacobian eigenvalues closer to zero than this are marginal and reported unstable.
inline constexpr double kMarginalTol = 1e-10;

BlochState mf_rhs(const BlochState& s, double omega, double gamma);
Eigen::Matrix3d mf_jacobian(const BlochState& s, double omega, double gamma);

/// Stability of an arbitrary point of the flow.
double mf_max_re_lambda(const BlochState& s, double omega, double gamma);

/// Absorbing point, plus the active pair when omega/gamma >= 1/sqrt(2).
std::vector<MfFixedPoint> mf_steady_states(double omega, double gamma);

struct MfScanRow {
    double omega = 0.0;
    MfFixedPoint point;
};

std::vector<MfScanRow> mf_branch_scan(const std::vector<double>& omega_grid, double gamma);

/// Classic RK4 integration of the flow; returns the final state.
BlochState mf_integrate(BlochState s, double omega, double gamma, double t_max, double dt = 1e-3);

} // namespace qcp
