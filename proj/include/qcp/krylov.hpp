#pragma once

// Matrix-free Krylov solvers. The operator is any callable op(x, y) that
// writes y = A x.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Jacobi>

#include "qcp/types.hpp"

namespace qcp {

struct GmresOptions {
    int restart = 40;
    int max_iterations = 200000;
    double abs_tol = 1e-12;  ///< on the true residual norm ||b - A x||
};

struct GmresReport {
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations. x holds
/// the initial guess on entry.
template <typename Scalar, typename Op>
GmresReport gmres(const Op& op, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
                  Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x, const GmresOptions& opt = {})
{
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Real = typename Eigen::NumTraits<Scalar>::Real;
    const Index n = b.size();
    if (x.size() != n) x = Vec::Zero(n);
    const int m = opt.restart;

    GmresReport rep;
    std::vector<Vec> V(static_cast<std::size_t>(m) + 1);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> Hm(m + 1, m);
    std::vector<Eigen::JacobiRotation<Scalar>> rot(static_cast<std::size_t>(m));
    Vec g(m + 1), w(n), Ax(n);

    while (true) {
        op(x, Ax);
        Vec r = b - Ax;
        const Real beta = r.norm();
        rep.residual = beta;
        if (beta <= opt.abs_tol) {
            rep.converged = true;
            return rep;
        }
        if (rep.iterations >= opt.max_iterations) return rep;

        V[0] = r / beta;
        g.setZero();
        g[0] = beta;
        Hm.setZero();
        int k = 0;
        for (; k < m && rep.iterations < opt.max_iterations; ++k) {
            ++rep.iterations;
            op(V[k], w);
            for (int i = 0; i <= k; ++i) {
                Hm(i, k) = V[i].dot(w);
                w.noalias() -= Hm(i, k) * V[i];
            }
            const Real hn = w.norm();
            Hm(k + 1, k) = hn;
            const bool breakdown = hn == Real(0);
            if (!breakdown) V[k + 1] = w / hn;

            auto hk = Hm.col(k);
            for (int i = 0; i < k; ++i) hk.applyOnTheLeft(i, i + 1, rot[i].adjoint());
            rot[k].makeGivens(Hm(k, k), Hm(k + 1, k), &Hm(k, k));
            Hm(k + 1, k) = Scalar(0);
            g.applyOnTheLeft(k, k + 1, rot[k].adjoint());

            // Stop the cycle slightly early so the true-residual check at the
            // restart confirms convergence.
            if (std::abs(g[k + 1]) <= Real(0.5) * opt.abs_tol || breakdown) {
                ++k;
                break;
            }
        }
        Vec y = Hm.topLeftCorner(k, k).template triangularView<Eigen::Upper>().solve(g.head(k));
        for (int i = 0; i < k; ++i) x.noalias() += y[i] * V[i];
    }
}

struct ArnoldiOptions {
    int max_dim = 160;
    int min_dim = 40;
    int check_every = 10;
    int max_restarts = 8;
    double tol = 1e-11;  ///< Ritz residual relative to |theta|
};

struct ArnoldiResult {
    Eigen::VectorXcd ritz_values;  ///< ordered by decreasing modulus
    Eigen::VectorXd residuals;     ///< |h_{m+1,m}| |e_m^T s| per Ritz value
    int dimension = 0;
    int restarts = 0;
    bool converged = false;
};

/// Largest-modulus eigenvalues of a real operator by Arnoldi iteration. The
/// basis grows until the leading `count` Ritz values have residuals below tol.
/// When max_dim is reached the iteration restarts from the sum of the real
/// and imaginary parts of the wanted Ritz vectors.
template <typename Op>
ArnoldiResult arnoldi_largest(const Op& op, const Eigen::VectorXd& start, int count, const ArnoldiOptions& opt = {})
{
    const Index n = start.size();
    const int mmax = static_cast<int>(std::min<Index>(opt.max_dim, n));
    std::vector<Eigen::VectorXd> V;
    V.reserve(static_cast<std::size_t>(mmax) + 1);
    Eigen::MatrixXd H(mmax + 1, mmax);
    Eigen::VectorXd w(n);
    Eigen::VectorXd v0 = start;
    ArnoldiResult res;
    for (int cycle = 0;; ++cycle) {
        V.clear();
        V.push_back(v0.normalized());
        H.setZero();
        for (int k = 0; k < mmax; ++k) {
            op(V[k], w);
            // Two passes of classical Gram-Schmidt keep the basis orthogonal.
            for (int pass = 0; pass < 2; ++pass)
                for (int i = 0; i <= k; ++i) {
                    const double h = V[i].dot(w);
                    H(i, k) += h;
                    w.noalias() -= h * V[i];
                }
            const double hn = w.norm();
            H(k + 1, k) = hn;
            const int m = k + 1;
            const bool invariant = hn <= 1e-300;
            const bool last = m == mmax || invariant;
            if (!last) V.push_back(w / hn);
            if (!last && (m < opt.min_dim || m % opt.check_every != 0)) continue;

            Eigen::EigenSolver<Eigen::MatrixXd> es(H.topLeftCorner(m, m));
            if (es.info() != Eigen::Success) throw NumericalError("arnoldi: Hessenberg eigensolve failed");
            const Eigen::VectorXcd theta = es.eigenvalues();
            const Eigen::MatrixXcd S = es.eigenvectors();
            std::vector<int> order(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(theta[a]) > std::abs(theta[b]); });
            res.ritz_values.resize(m);
            res.residuals.resize(m);
            bool ok = true;
            for (int i = 0; i < m; ++i) {
                const int j = order[i];
                res.ritz_values[i] = theta[j];
                res.residuals[i] = hn * std::abs(S(m - 1, j)) / S.col(j).norm();
                if (i < count && res.residuals[i] > opt.tol * std::abs(theta[j])) ok = false;
            }
            res.dimension = m;
            res.restarts = cycle;
            res.converged = ok || invariant;
            if (res.converged) return res;
            if (!last) continue;
            if (cycle >= opt.max_restarts) return res;

            v0.setZero();
            for (int i = 0; i < std::min(count, m); ++i) {
                const Eigen::VectorXcd s = S.col(order[i]) / S.col(order[i]).norm();
                for (int c = 0; c < m; ++c) v0.noalias() += (s[c].real() + s[c].imag()) * V[c];
            }
        }
    }
}

} // namespace qcp
