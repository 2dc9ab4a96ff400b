#include "qcp/steady_state.hpp"

#include <Eigen/SparseLU>

namespace qcp {

Eigen::VectorXd SteadyStateSolver::solve(const PhaseFrame& frame, SteadyStateReport* report)
{
    const Index n = frame.sector_dim(Sector::symmetric);
    const double c = frame.params().gamma;
    const Eigen::VectorXd tr = frame.trace_functional();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs[0] = -c;

    SteadyStateReport rep;
    Eigen::VectorXd x;
    if (n <= opt_.direct_max_dim) {
        Eigen::SparseMatrix<double> A = frame.sector_matrix(Sector::symmetric);
        {
            Eigen::SparseMatrix<double> border(n, n);
            std::vector<Eigen::Triplet<double>> t;
            for (Index k = 0; k < n; ++k)
                if (tr[k] != 0.0) t.emplace_back(0, k, -c);
            border.setFromTriplets(t.begin(), t.end());
            A += border;
        }
        A.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(A);
        lu.factorize(A);
        if (lu.info() != Eigen::Success) throw NumericalError("steady state: singular bordered system");
        x = lu.solve(rhs);
        rep.direct = true;
    } else {
        x = warm_.size() == n ? warm_ : Eigen::VectorXd(Eigen::VectorXd::Unit(n, 0));
        const auto op = [&](const Eigen::VectorXd& v, Eigen::VectorXd& y) {
            frame.apply_packed(v, y, Sector::symmetric);
            y[0] -= c * tr.dot(v);
        };
        const GmresReport g = gmres<double>(op, rhs, x, opt_.gmres);
        rep.iterations = g.iterations;
        if (!g.converged)
            throw NumericalError("steady state: GMRES stalled at residual " + std::to_string(g.residual) + " after " +
                                 std::to_string(g.iterations) + " iterations");
    }

    const double t = tr.dot(x);
    if (!(std::abs(t) > 0.5)) throw NumericalError("steady state: trace collapsed to " + std::to_string(t));
    x /= t;
    Eigen::VectorXd sx;
    frame.apply_packed(x, sx, Sector::symmetric);
    rep.residual = sx.norm();
    if (!(rep.residual <= opt_.residual_tol))
        throw NumericalError("steady state: residual " + std::to_string(rep.residual) + " exceeds tolerance");
    warm_ = x;
    if (report) *report = rep;
    return x;
}

Eigen::VectorXd solve_steady_state(const PhaseFrame& frame, SteadyStateReport* report, const SteadyStateOptions& opt)
{
    SteadyStateSolver s(opt);
    return s.solve(frame, report);
}

} // namespace qcp
