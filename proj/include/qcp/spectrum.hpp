#pragma once

// Liouvillian eigenvalues, gap and family classification, and the 1/L
// extrapolation of the gap.

#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "qcp/model.hpp"
#include "qcp/steady_state.hpp"

namespace qcp {

inline constexpr double kZeroModeTol = 1e-9;
inline constexpr double kDegeneracyTol = 1e-8;
inline constexpr int kMaxDenseSpectrumSites = 6;
inline constexpr int kMaxKrylovSpectrumSites = 10;

struct SpectrumResult {
    Eigen::VectorXcd eigenvalues;  ///< descending real part, then descending imaginary part
    bool complete = false;         ///< all 4^L eigenvalues present
    int zero_modes = 0;
    double gap = 0.0;              ///< |largest real part| over the nonzero eigenvalues
    double mu_half = std::numeric_limits<double>::quiet_NaN();
    double mu_one = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXcd steady_vec;   ///< column-stacked unit-trace steady state
    double steady_residual = 0.0;  ///< ||L vec(rho_ss)||
};

/// Fills zero_modes, gap, mu_half and mu_one from the eigenvalue list.
/// mu_one is the first real, non-degenerate, nonzero eigenvalue in descending
/// real part; at omega = 0 it is -gamma by definition.
void classify(SpectrumResult& r, const ModelParams& p);

/// Number of eigenvalues within kDegeneracyTol of eigenvalue i (componentwise).
int multiplicity(const Eigen::VectorXcd& eigs, Index i, double tol = kDegeneracyTol);

/// Dense eigensolve of both transposition sectors (L <= 6).
SpectrumResult full_spectrum(const ModelParams& p);

struct KrylovOptions {
    int max_dim = 160;
    double ritz_tol = 1e-11;
    Index lu_max_dim = 8256;     ///< shift-invert by sparse LU up to this sector size (L = 7)
    SteadyStateOptions inner{};  ///< sector sizes for LU, GMRES settings for the inner solves
};

/// The k eigenvalues nearest to zero by shift-invert Arnoldi at shift 0,
/// after deflating the zero mode. Throws NumericalError on non-convergence.
SpectrumResult leading_spectrum(const ModelParams& p, int k, const KrylovOptions& opt = {});

/// mu_1 along an ascending omega grid: exactly -gamma at omega = 0, the
/// classification rule at the first positive omega, nearest real eigenvalue
/// afterwards.
std::vector<double> track_mu1(const ModelParams& base, const std::vector<double>& omegas,
                              const std::function<SpectrumResult(const ModelParams&)>& solver);

struct GapExtrapolation {
    std::vector<int> sizes;
    std::vector<double> gap_values;
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    double gap_tdl = 0.0;  ///< min(gamma/2, max(0, intercept))
    bool closed = false;   ///< intercept <= 0
};

GapExtrapolation extrapolate_gap(const std::map<int, double>& mu1_abs, double gamma = 1.0);

} // namespace qcp
