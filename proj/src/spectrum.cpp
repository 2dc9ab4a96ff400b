#include "qcp/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "qcp/fitting.hpp"
#include "qcp/krylov.hpp"
#include "qcp/phase_frame.hpp"

namespace qcp {

namespace {

void sort_descending(Eigen::VectorXcd& v)
{
    std::sort(v.data(), v.data() + v.size(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
}

bool is_real(const cplx& z) { return std::abs(z.imag()) <= kDegeneracyTol; }

void attach_steady_state(SpectrumResult& r, const PhaseFrame& frame, const Eigen::VectorXd& x)
{
    Eigen::VectorXd sx;
    frame.apply_packed(x, sx, Sector::symmetric);
    r.steady_residual = sx.norm();
    const RowMatrixXd rs = frame.unpack(x, Sector::symmetric);
    const DensityMatrix rho(frame.to_density(rs, RowMatrixXd()));
    rho.check(1e-7);
    if (rho.dim() <= 1024 && rho.min_eigenvalue() < -1e-7)
        throw NumericalError("spectrum: steady state is not positive");
    r.steady_vec = vectorize(rho.matrix());
}

Eigen::VectorXd seeded_start(Index n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (Index i = 0; i < n; ++i) v[i] = u(rng);
    return v;
}

} // namespace

int multiplicity(const Eigen::VectorXcd& eigs, Index i, double tol)
{
    int m = 0;
    for (Index j = 0; j < eigs.size(); ++j)
        if (std::abs(eigs[j].real() - eigs[i].real()) <= tol && std::abs(eigs[j].imag() - eigs[i].imag()) <= tol) ++m;
    return m;
}

void classify(SpectrumResult& r, const ModelParams& p)
{
    r.zero_modes = 0;
    double top = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < r.eigenvalues.size(); ++i) {
        const cplx z = r.eigenvalues[i];
        if (std::abs(z) <= kZeroModeTol) {
            ++r.zero_modes;
            continue;
        }
        top = std::max(top, z.real());
    }
    r.gap = std::isfinite(top) ? std::abs(top) : 0.0;

    r.mu_half = r.mu_one = std::numeric_limits<double>::quiet_NaN();
    for (Index i = 0; i < r.eigenvalues.size(); ++i) {
        const cplx z = r.eigenvalues[i];
        if (std::abs(z) <= kZeroModeTol || !is_real(z)) continue;
        const int m = multiplicity(r.eigenvalues, i);
        if (m >= 2 && std::isnan(r.mu_half)) r.mu_half = z.real();
        if (m == 1 && std::isnan(r.mu_one)) r.mu_one = z.real();
    }
    if (p.omega == 0.0) r.mu_one = -p.gamma;
}

SpectrumResult full_spectrum(const ModelParams& p)
{
    p.validate();
    if (p.L > kMaxDenseSpectrumSites)
        throw std::invalid_argument("full_spectrum: L = " + std::to_string(p.L) + " exceeds the dense limit of " +
                                    std::to_string(kMaxDenseSpectrumSites));
    const PhaseFrame frame(p);
    SpectrumResult r;
    std::vector<cplx> all;
    for (const Sector s : {Sector::symmetric, Sector::antisymmetric}) {
        if (frame.sector_dim(s) == 0) continue;
        const Eigen::MatrixXd m(frame.sector_matrix(s));
        const Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
        if (es.info() != Eigen::Success) throw NumericalError("full_spectrum: eigensolver failed");
        for (Index i = 0; i < es.eigenvalues().size(); ++i) all.push_back(es.eigenvalues()[i]);
    }
    r.eigenvalues = Eigen::Map<Eigen::VectorXcd>(all.data(), static_cast<Index>(all.size()));
    sort_descending(r.eigenvalues);
    r.complete = true;
    classify(r, p);
    if (r.zero_modes == 0) throw NumericalError("full_spectrum: no zero eigenvalue found");
    attach_steady_state(r, frame, solve_steady_state(frame));
    return r;
}

SpectrumResult leading_spectrum(const ModelParams& p, int k, const KrylovOptions& opt)
{
    p.validate();
    if (p.L > kMaxKrylovSpectrumSites)
        throw std::invalid_argument("leading_spectrum: L = " + std::to_string(p.L) + " exceeds the limit of " +
                                    std::to_string(kMaxKrylovSpectrumSites));
    if (k < 1 || k > 40) throw std::invalid_argument("leading_spectrum: k must lie in [1, 40]");
    const PhaseFrame frame(p);
    const double shift_out = 100.0 * p.gamma * (p.L + 1);
    std::vector<cplx> found{cplx(0.0)};
    const Eigen::VectorXd steady = solve_steady_state(frame, nullptr, opt.inner);

    for (const Sector s : {Sector::symmetric, Sector::antisymmetric}) {
        const Index n = frame.sector_dim(s);
        if (n == 0) continue;
        const bool deflate = s == Sector::symmetric;
        const Eigen::VectorXd tr = deflate ? frame.trace_functional() : Eigen::VectorXd();
        const auto apply_a = [&](const Eigen::VectorXd& v, Eigen::VectorXd& y) {
            frame.apply_packed(v, y, s);
            if (deflate) y[0] -= shift_out * tr.dot(v);
        };

        std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> inverse;
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        if (n <= opt.lu_max_dim) {
            Eigen::SparseMatrix<double> A = frame.sector_matrix(s);
            if (deflate) {
                std::vector<Eigen::Triplet<double>> t;
                for (Index j = 0; j < n; ++j)
                    if (tr[j] != 0.0) t.emplace_back(0, j, -shift_out);
                Eigen::SparseMatrix<double> border(n, n);
                border.setFromTriplets(t.begin(), t.end());
                A += border;
            }
            A.makeCompressed();
            lu.analyzePattern(A);
            lu.factorize(A);
            if (lu.info() != Eigen::Success) throw NumericalError("leading_spectrum: factorization failed");
            inverse = [&lu](const Eigen::VectorXd& v, Eigen::VectorXd& y) { y = lu.solve(v); };
        } else {
            inverse = [&, s](const Eigen::VectorXd& v, Eigen::VectorXd& y) {
                y = Eigen::VectorXd::Zero(v.size());
                GmresOptions g = opt.inner.gmres;
                g.abs_tol = std::max(1e-13, 1e-12 * v.norm());
                const GmresReport rep = gmres<double>(apply_a, v, y, g);
                if (!rep.converged)
                    throw NumericalError("leading_spectrum: inner GMRES stalled at " + std::to_string(rep.residual) +
                                         (s == Sector::symmetric ? " (symmetric sector)" : " (antisymmetric sector)"));
            };
        }

        ArnoldiOptions ao;
        ao.max_dim = std::max(opt.max_dim, 3 * k + 20);
        ao.min_dim = std::min<int>(static_cast<int>(n), std::max(2 * k, 20));
        ao.tol = opt.ritz_tol;
        const int count = static_cast<int>(std::min<Index>(k, n));
        const ArnoldiResult ar =
            arnoldi_largest(inverse, seeded_start(n, deflate ? 0x5eedULL : 0xa5eedULL), count, ao);
        if (!ar.converged)
            throw NumericalError("leading_spectrum: Arnoldi did not converge within " + std::to_string(ar.dimension) +
                                 " vectors");
        for (int i = 0; i < count && i < ar.ritz_values.size(); ++i) {
            const cplx mu = 1.0 / ar.ritz_values[i];
            if (deflate && mu.real() < -0.5 * shift_out) continue;
            found.push_back(mu);
        }
    }

    std::sort(found.begin(), found.end(), [](const cplx& a, const cplx& b) { return std::abs(a) < std::abs(b); });
    if (static_cast<int>(found.size()) > k) found.resize(static_cast<std::size_t>(k));
    SpectrumResult r;
    r.eigenvalues = Eigen::Map<Eigen::VectorXcd>(found.data(), static_cast<Index>(found.size()));
    sort_descending(r.eigenvalues);
    r.complete = false;
    classify(r, p);
    attach_steady_state(r, frame, steady);
    if (r.steady_residual > kZeroModeTol)
        throw NumericalError("leading_spectrum: zero-mode residual " + std::to_string(r.steady_residual));
    return r;
}

std::vector<double> track_mu1(const ModelParams& base, const std::vector<double>& omegas,
                              const std::function<SpectrumResult(const ModelParams&)>& solver)
{
    if (!std::is_sorted(omegas.begin(), omegas.end())) throw std::invalid_argument("track_mu1: grid must ascend");
    std::vector<double> out;
    bool seeded = false;
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        const double w = omegas[k];
        ModelParams p = base;
        p.omega = w;
        if (w == 0.0) {
            out.push_back(-p.gamma);
            continue;
        }
        const SpectrumResult r = solver(p);
        double mu = r.mu_one;
        if (seeded) {
            // Linear predictor; a constant mode at exactly -gamma sits next to
            // mu_1 at small omega.
            double guess = out[k - 1];
            if (k >= 2) guess += (out[k - 1] - out[k - 2]) / (omegas[k - 1] - omegas[k - 2]) * (w - omegas[k - 1]);
            double best = std::numeric_limits<double>::infinity();
            for (Index i = 0; i < r.eigenvalues.size(); ++i) {
                const cplx z = r.eigenvalues[i];
                if (std::abs(z) <= kZeroModeTol || !is_real(z) || multiplicity(r.eigenvalues, i) != 1) continue;
                if (std::abs(z.real() - guess) < best) {
                    best = std::abs(z.real() - guess);
                    mu = z.real();
                }
            }
        }
        if (std::isnan(mu)) throw NumericalError("track_mu1: no real non-degenerate eigenvalue at omega = " + std::to_string(w));
        out.push_back(mu);
        seeded = true;
    }
    return out;
}

GapExtrapolation extrapolate_gap(const std::map<int, double>& mu1_abs, double gamma)
{
    if (mu1_abs.size() < 3) throw std::invalid_argument("extrapolate_gap: need at least three sizes");
    GapExtrapolation g;
    std::vector<double> xs;
    for (const auto& [L, v] : mu1_abs) {
        g.sizes.push_back(L);
        g.gap_values.push_back(v);
        xs.push_back(1.0 / L);
    }
    const LinearFit f = linfit(xs, g.gap_values);
    g.slope = f.slope;
    g.intercept = f.intercept;
    g.residual_rms = f.residual_rms;
    g.closed = f.intercept <= 0.0;
    g.gap_tdl = std::min(0.5 * gamma, std::max(0.0, f.intercept));
    return g;
}

} // namespace qcp
