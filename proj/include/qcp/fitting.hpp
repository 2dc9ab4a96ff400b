#pragma once

#include <functional>
#include <span>

#include "qcp/types.hpp"

namespace qcp {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
};

/// Ordinary least squares y = slope x + intercept. Throws on fewer than two
/// points or identical abscissae.
LinearFit linfit(std::span<const double> xs, std::span<const double> ys);

struct ExpFit {
    double a = 0.0;  ///< |w| = a exp(-b L)
    double b = 0.0;
};

struct PowerFit {
    double c = 0.0;  ///< |w| = c L^(-n)
    double n = 0.0;
};

ExpFit two_point_exp_fit(double L1, double w1, double L2, double w2);
PowerFit two_point_power_fit(double L1, double w1, double L2, double w2);

/// Least-squares versions on log |w|.
ExpFit lsq_exp_fit(std::span<const double> Ls, std::span<const double> ws);
PowerFit lsq_power_fit(std::span<const double> Ls, std::span<const double> ws);

/// Dirichlet eta function for real s > 0, by a fixed 30-term accelerated
/// alternating series.
double eta(double s);
/// Riemann zeta for real s > 1 through eta(s) / (1 - 2^(1-s)).
double zeta(double s);

double central_difference(const std::function<double(double)>& f, double x, double h);

} // namespace qcp
