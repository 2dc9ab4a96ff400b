#pragma once

// Linked-cluster expansion of the steady-state susceptibility on open chains.

#include <optional>
#include <string>
#include <vector>

#include "qcp/fitting.hpp"
#include "qcp/steady_state.hpp"

namespace qcp {

struct ChainSusceptibility {
    double value = 0.0;       ///< central difference at h
    double value_half = 0.0;  ///< central difference at h/2
    double relative_change = 0.0;
    bool linear = true;       ///< relative_change <= 1e-4
};

/// d/dh sum_j <sigma^y_j>_ss of the open ell-chain with probe h sum_j sigma^x_j.
ChainSusceptibility chain_susceptibility_extensive(double omega, double gamma, int ell, double h_step = 1e-3,
                                                   const SteadyStateOptions& opt = {});

/// Same derivative taken exactly at h = 0 from first-order perturbation theory
/// around the dark state: one complex linear solve of size 2^ell - 1.
double chain_susceptibility_linear(double omega, double gamma, int ell);

/// w(L) = P(L) - sum over proper connected subchains. p[i] holds P(i + 1).
std::vector<double> weights_inclusion_exclusion(const std::vector<double>& p);
/// w(L) = P(L) - 2 P(L-1) + P(L-2) with P(0) = P(-1) = 0.
std::vector<double> weights_second_difference(const std::vector<double>& p);

enum class SusceptibilityMethod { finite_difference, linear_response };

struct WeightSeries {
    double omega = 0.0;
    double gamma = 1.0;
    double h_step = 1e-3;
    SusceptibilityMethod method = SusceptibilityMethod::finite_difference;
    std::vector<double> p_values;      ///< index ell - 1
    std::vector<bool> linear_ok;       ///< Richardson check per ell (finite differences only)
    std::vector<double> weights;       ///< index L - 1
    std::vector<double> partial_sums;  ///< index R - 1
    double recursion_mismatch = 0.0;   ///< max |inclusion-exclusion - second difference|
    int r_max() const { return static_cast<int>(weights.size()); }
};

/// Weights and partial sums from given chain values.
WeightSeries weights_from_values(double omega, double gamma, const std::vector<double>& p_values);

WeightSeries compute_weights(double omega, double gamma, int r_max, double h_step = 1e-3,
                             SusceptibilityMethod method = SusceptibilityMethod::finite_difference, int threads = 1);

enum class Regime { automatic, exponential, power_law };
enum class FitMethod { two_point, least_squares };

std::string to_string(Regime r);

struct ChiExtrapolation {
    Regime regime = Regime::exponential;  ///< regime actually used
    ExpFit exp_fit;
    PowerFit power_fit;
    double tail_exp = 0.0;
    double tail_power = 0.0;
    bool exp_feasible = false;    ///< b > 0
    bool power_feasible = false;  ///< n > 1
    double partial_sum = 0.0;
    double chi_tdl = 0.0;         ///< partial_sum + tail of the selected regime
    bool extrapolable = false;    ///< false: chi_tdl is the bare partial sum
    bool alternating = false;     ///< sign(w(L)) = (-1)^(L-1) for every L
    int r_max = 0;
};

struct ExtrapolationOptions {
    Regime regime = Regime::automatic;
    FitMethod method = FitMethod::two_point;
    double transition = 5.83;  ///< automatic regime switch, units of gamma
    int lsq_min_L = 3;
};

ChiExtrapolation extrapolate_chi(const WeightSeries& ws, const ExtrapolationOptions& opt = {});

/// Alternating tails beyond R.
double tail_exponential(const ExpFit& f, int R);
double tail_power(const PowerFit& f, int R);

} // namespace qcp
