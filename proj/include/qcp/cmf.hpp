#pragma once

// Cluster mean field with the boundary field F: a cluster of L sites feels
// Omega F (sigma^x_1 + sigma^x_L) from its neighbours, and self-consistency
// asks <n_1>_ss(F) = F.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcp/model.hpp"
#include "qcp/steady_state.hpp"

namespace qcp {

struct EffectiveField {
    double f_n = 0.0;
    double f_x = 0.0;  ///< always zero
};

struct BoundaryResponse {
    double n_1 = 0.0;
    double n_bar = 0.0;
    DensityMatrix rho_ss;
};

/// Frozen-field steady state of one cluster. Reuses the previous solution as
/// the starting guess of the next solve.
class CmfMap {
public:
    CmfMap(double omega, double gamma, int L_cluster, SteadyStateOptions opt = {});

    double n_1(double f);
    /// Switches the rate; the last solution stays as the starting guess.
    void set_omega(double omega);
    BoundaryResponse response(double f);
    int cluster_size() const { return p_.L; }
    const ModelParams& params() const { return p_; }
    long evaluations() const { return evaluations_; }

private:
    Eigen::VectorXd solve(double f);

    ModelParams p_;
    PhaseFrame frame_;
    SteadyStateSolver solver_;
    long evaluations_ = 0;
};

/// <n_1> and the steady state of the cluster at frozen field f. Asserts the
/// reflection symmetry <n_1> = <n_L> to 1e-9.
BoundaryResponse boundary_response(const ModelParams& p, int L_cluster, double f_n);

/// Single-site closed form of <n_1>(F), used as an oracle.
double single_site_response(double omega, double gamma, double f);

struct CmfFixedPoint {
    double f_n_star = 0.0;
    double n_boundary = 0.0;
    double n_bar = 0.0;   ///< cluster-averaged population
    double slope = 0.0;   ///< d n_1 / dF
    bool stable = false;  ///< slope < 1
    DensityMatrix rho_ss;
};

struct FixedPointOptions {
    int grid_points = 200;
    double f_max = 1.05;
    double root_tol = 1e-6;
    double slope_step = 1e-4;
    int threads = 1;
    bool keep_states = true;
};

/// Fixed points of a generic map n(F): grid scan of g(F) = n(F) - F, bisection
/// of every sign change, central-difference slope. F = 0 is always included.
/// `map_factory` must return an independent evaluator per call so grid points
/// can be processed in parallel.
std::vector<CmfFixedPoint> find_fixed_points(const std::function<std::function<double(double)>()>& map_factory,
                                             const FixedPointOptions& opt = {});

/// Fixed points of the cluster map.
std::vector<CmfFixedPoint> find_fixed_points(const ModelParams& p, int L_cluster, const FixedPointOptions& opt = {});

enum class CmfBranchLabel { absorbing, active_stable, active_unstable };
std::string to_string(CmfBranchLabel l);

struct BranchRow {
    double omega = 0.0;
    double f_star = 0.0;
    double n_bar_ss = 0.0;
    double slope = 0.0;
    CmfBranchLabel label = CmfBranchLabel::absorbing;
};

struct Branch {
    int L_cluster = 0;
    std::vector<BranchRow> rows;
    std::optional<double> omega_c;  ///< set when the grid brackets the saddle node
};

/// Fixed points on a sorted omega grid; omega_c bisected between the last
/// point with only the absorbing solution and the first with an active pair.
Branch trace_branches(const std::vector<double>& omegas, double gamma, int L_cluster, const FixedPointOptions& opt = {},
                      double omega_tol = 1e-3);

struct HumpResult {
    double max_excess = 0.0;  ///< max over F of n_1(F) - F; negative: F = 0 is the only fixed point
    double f_at = 0.0;
    int evaluations = 0;
};

/// The hump of n_1(F) - F at fixed omega: coarse scan of [f_lo, f_hi], then
/// Brent on the best sub-bracket.
HumpResult cmf_hump(int L_cluster, double gamma, double omega, double f_lo = 0.0, double f_hi = 0.7,
                    int scan_points = 16);

struct OmegaCResult {
    double omega_c = 0.0;
    double f_at_omega_c = 0.0;  ///< location of the tangency
    int map_evaluations = 0;
};

/// Saddle node of the cluster map from the sign change of
/// m(Omega) = max_F [n_1(F) - F], starting from the bracket [lo, hi].
OmegaCResult locate_omega_c(int L_cluster, double gamma, double lo, double hi, double omega_tol = 1e-4);

} // namespace qcp
