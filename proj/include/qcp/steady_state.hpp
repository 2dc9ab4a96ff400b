#pragma once

// Unit-trace steady state of the symmetric sector.
//
// The zero mode of the sector generator S is removed by a rank-one update,
// A = S - c e_0 tr^T, which moves the zero eigenvalue to -c and leaves the
// rest of the spectrum untouched. A x = -c e_0 then has the normalized steady
// state as its unique solution.

#include <memory>
#include <optional>

#include "qcp/krylov.hpp"
#include "qcp/phase_frame.hpp"

namespace qcp {

struct SteadyStateOptions {
    Index direct_max_dim = 2080;  ///< sparse LU up to this sector size (L = 6), GMRES above
    double residual_tol = 1e-10;  ///< required ||S x||
    GmresOptions gmres{60, 400000, 1e-12};
};

struct SteadyStateReport {
    double residual = 0.0;  ///< ||S x|| after normalization
    int iterations = 0;     ///< GMRES iterations, 0 for the direct path
    bool direct = false;
};

class SteadyStateSolver {
public:
    explicit SteadyStateSolver(SteadyStateOptions opt = {}) : opt_(opt) {}

    /// Packed symmetric-sector steady state. The previous solution is reused
    /// as the initial guess when the dimension matches.
    Eigen::VectorXd solve(const PhaseFrame& frame, SteadyStateReport* report = nullptr);

    void reset_warm_start() { warm_.resize(0); }
    const SteadyStateOptions& options() const { return opt_; }

private:
    SteadyStateOptions opt_;
    Eigen::VectorXd warm_;
};

/// Convenience wrapper around a fresh solver.
Eigen::VectorXd solve_steady_state(const PhaseFrame& frame, SteadyStateReport* report = nullptr,
                                   const SteadyStateOptions& opt = {});

} // namespace qcp
