#include "qcp/model.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

namespace qcp {

void ModelParams::validate() const
{
    if (L < 1) throw std::invalid_argument("L must be at least 1");
    if (L > kMaxHilbertSites)
        throw std::invalid_argument("L = " + std::to_string(L) + " exceeds the Hilbert-space limit of " +
                                    std::to_string(kMaxHilbertSites) + " sites");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (!(omega >= 0.0)) throw std::invalid_argument("omega must be non-negative");
    if (!(h_x >= 0.0)) throw std::invalid_argument("h_x must be non-negative");
}

SparseOperator::SparseOperator(Storage m) : m_(std::move(m))
{
    if (m_.rows() != m_.cols()) throw std::invalid_argument("SparseOperator must be square");
    m_.makeCompressed();
}

SparseOperator SparseOperator::from_triplets(Index dim, const std::vector<Eigen::Triplet<cplx>>& triplets)
{
    Storage m(dim, dim);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.prune(cplx(0.0));
    return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::identity(Index dim)
{
    Storage m(dim, dim);
    m.setIdentity();
    return SparseOperator(std::move(m));
}

double SparseOperator::hermiticity_defect() const
{
    Storage diff = m_ - Storage(m_.adjoint());
    double worst = 0.0;
    for (Index k = 0; k < diff.outerSize(); ++k)
        for (Storage::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    return worst;
}

SparseOperator SparseOperator::adjoint() const { return SparseOperator(Storage(m_.adjoint())); }

void SparseOperator::write_triplets(std::ostream& os) const
{
    const auto precision = os.precision(17);
    for (Index k = 0; k < m_.outerSize(); ++k)
        for (Storage::InnerIterator it(m_, k); it; ++it)
            os << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
    os.precision(precision);
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b)
{
    return SparseOperator(SparseOperator::Storage(a.m_ + b.m_));
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b)
{
    return SparseOperator(SparseOperator::Storage(a.m_ * b.m_));
}

SparseOperator operator*(cplx s, const SparseOperator& a) { return SparseOperator(SparseOperator::Storage(s * a.m_)); }

SparseOperator site_operator(int L, int site, SiteOp op)
{
    if (L < 1 || L > kMaxHilbertSites) throw std::invalid_argument("site_operator: bad chain length");
    if (site < 0 || site >= L) throw std::invalid_argument("site_operator: site out of range");
    const Index dim = Index{1} << L;
    const std::uint64_t bit = site_bit(L, site);
    const cplx I(0.0, 1.0);
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(dim);
    for (std::uint64_t a = 0; a < static_cast<std::uint64_t>(dim); ++a) {
        const bool up = a & bit;
        const auto flipped = static_cast<Index>(a ^ bit);
        const auto col = static_cast<Index>(a);
        switch (op) {
        case SiteOp::sigma_x: t.emplace_back(flipped, col, 1.0); break;
        // sigma^y |up> = i |down>, sigma^y |down> = -i |up>
        case SiteOp::sigma_y: t.emplace_back(flipped, col, up ? I : -I); break;
        case SiteOp::sigma_z: t.emplace_back(col, col, up ? 1.0 : -1.0); break;
        case SiteOp::sigma_plus:
            if (!up) t.emplace_back(flipped, col, 1.0);
            break;
        case SiteOp::sigma_minus:
            if (up) t.emplace_back(flipped, col, 1.0);
            break;
        case SiteOp::number:
            if (up) t.emplace_back(col, col, 1.0);
            break;
        }
    }
    return SparseOperator::from_triplets(dim, t);
}

SparseOperator build_hamiltonian(const ModelParams& p, double boundary_field)
{
    p.validate();
    const int L = p.L;
    const Index dim = p.dim();
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(static_cast<std::size_t>(dim) * (2 * L + 2));
    for (std::uint64_t a = 0; a < static_cast<std::uint64_t>(dim); ++a) {
        const auto col = static_cast<Index>(a);
        for (int j = 0; j + 1 < L; ++j) {
            const std::uint64_t bj = site_bit(L, j), bk = site_bit(L, j + 1);
            // sigma^x_j n_{j+1} and n_j sigma^x_{j+1}
            if (a & bk) t.emplace_back(static_cast<Index>(a ^ bj), col, p.omega);
            if (a & bj) t.emplace_back(static_cast<Index>(a ^ bk), col, p.omega);
        }
        if (p.h_x != 0.0)
            for (int j = 0; j < L; ++j) t.emplace_back(static_cast<Index>(a ^ site_bit(L, j)), col, p.h_x);
        if (boundary_field != 0.0) {
            const double f = p.omega * boundary_field;
            t.emplace_back(static_cast<Index>(a ^ site_bit(L, 0)), col, f);
            t.emplace_back(static_cast<Index>(a ^ site_bit(L, L - 1)), col, f);
        }
    }
    return SparseOperator::from_triplets(dim, t);
}

Eigen::MatrixXcd apply_lindblad_rhs(const ModelParams& p, const SparseOperator& H, const Eigen::MatrixXcd& rho)
{
    p.validate();
    const Index dim = p.dim();
    if (H.dim() != dim || rho.rows() != dim || rho.cols() != dim)
        throw std::invalid_argument("apply_lindblad_rhs: dimension mismatch");
    const cplx I(0.0, 1.0);
    const auto& h = H.matrix();
    Eigen::MatrixXcd out = -I * (h * rho) + I * (h.adjoint() * rho.adjoint()).adjoint();

    const int L = p.L;
    for (int j = 0; j < L; ++j) {
        const std::uint64_t bit = site_bit(L, j);
        for (Index b = 0; b < dim; ++b) {
            const bool b_up = static_cast<std::uint64_t>(b) & bit;
            for (Index a = 0; a < dim; ++a) {
                const bool a_up = static_cast<std::uint64_t>(a) & bit;
                double occ = 0.5 * ((a_up ? 1.0 : 0.0) + (b_up ? 1.0 : 0.0));
                cplx v = -occ * rho(a, b);
                if (!a_up && !b_up) v += rho(static_cast<Index>(a | bit), static_cast<Index>(b | bit));
                out(a, b) += p.gamma * v;
            }
        }
    }
    return out;
}

SparseOperator build_liouvillian_matrix(const ModelParams& p, double boundary_field)
{
    p.validate();
    if (p.L > kMaxSuperoperatorSites)
        throw std::invalid_argument("build_liouvillian_matrix: L = " + std::to_string(p.L) +
                                    " exceeds the superoperator limit of " +
                                    std::to_string(kMaxSuperoperatorSites) + " sites");
    const SparseOperator H = build_hamiltonian(p, boundary_field);
    const Index N = p.dim();
    const int L = p.L;
    const cplx I(0.0, 1.0);
    const auto vec_index = [N](Index row, Index col) { return col * N + row; };

    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(static_cast<std::size_t>(N * N) * (2 * (H.matrix().nonZeros() / N + 1) + L + 1));
    const auto& h = H.matrix();
    for (Index k = 0; k < N; ++k) {
        for (SparseOperator::Storage::InnerIterator it(h, k); it; ++it) {
            const Index c = it.col();
            const cplx v = it.value();  // H_{kc}
            for (Index m = 0; m < N; ++m) {
                // -i (H rho)_{k m} gets H_kc rho_cm
                t.emplace_back(vec_index(k, m), vec_index(c, m), -I * v);
                // +i (rho H)_{m c} gets rho_mk H_kc
                t.emplace_back(vec_index(m, c), vec_index(m, k), I * v);
            }
        }
    }
    for (Index a = 0; a < N; ++a) {
        for (Index b = 0; b < N; ++b) {
            const auto ua = static_cast<std::uint64_t>(a), ub = static_cast<std::uint64_t>(b);
            const Index row = vec_index(a, b);
            t.emplace_back(row, row, -0.5 * p.gamma * (popcount(ua) + popcount(ub)));
            for (int j = 0; j < L; ++j) {
                const std::uint64_t bit = site_bit(L, j);
                if (!(ua & bit) && !(ub & bit))
                    t.emplace_back(row, vec_index(static_cast<Index>(ua | bit), static_cast<Index>(ub | bit)),
                                   p.gamma);
            }
        }
    }
    return SparseOperator::from_triplets(N * N, t);
}

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho)
{
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

Eigen::MatrixXcd matricize(const Eigen::VectorXcd& v)
{
    const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (n * n != v.size()) throw std::invalid_argument("matricize: length is not a perfect square");
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), n, n);
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m))
{
    if (m_.rows() != m_.cols() || m_.rows() == 0) throw std::invalid_argument("DensityMatrix must be square");
    const Index d = m_.rows();
    if ((d & (d - 1)) != 0) throw std::invalid_argument("DensityMatrix dimension must be a power of two");
}

int DensityMatrix::sites() const
{
    int L = 0;
    while ((Index{1} << L) < dim()) ++L;
    return L;
}

DensityMatrix DensityMatrix::product_state(int L, std::uint64_t basis_state)
{
    const Index dim = Index{1} << L;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    m(static_cast<Index>(basis_state), static_cast<Index>(basis_state)) = 1.0;
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::random(int L, std::uint64_t seed)
{
    const Index dim = Index{1} << L;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXcd g(dim, dim);
    for (Index j = 0; j < dim; ++j)
        for (Index i = 0; i < dim; ++i) g(i, j) = cplx(normal(rng), normal(rng));
    Eigen::MatrixXcd m = g * g.adjoint();
    m /= m.trace().real();
    return DensityMatrix(std::move(m));
}

double DensityMatrix::min_eigenvalue() const
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m_ + m_.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void DensityMatrix::check(double tol) const
{
    if (trace_error() > tol) throw NumericalError("density matrix trace deviates from 1 by " + std::to_string(trace_error()));
    if (hermiticity_error() > tol)
        throw NumericalError("density matrix is not Hermitian (defect " + std::to_string(hermiticity_error()) + ")");
}

double DensityMatrix::expectation(const SparseOperator& op) const
{
    if (op.dim() != dim()) throw std::invalid_argument("expectation: dimension mismatch");
    // tr(A rho) = sum_{ij} A_ij rho_ji
    cplx acc = 0.0;
    const auto& a = op.matrix();
    for (Index i = 0; i < a.outerSize(); ++i)
        for (SparseOperator::Storage::InnerIterator it(a, i); it; ++it) acc += it.value() * m_(it.col(), i);
    return acc.real();
}

double DensityMatrix::population(int site) const
{
    const int L = sites();
    if (site < 0 || site >= L) throw std::invalid_argument("population: site out of range");
    const std::uint64_t bit = site_bit(L, site);
    double n = 0.0;
    for (Index a = 0; a < dim(); ++a)
        if (static_cast<std::uint64_t>(a) & bit) n += m_(a, a).real();
    return n;
}

double DensityMatrix::mean_population() const
{
    const int L = sites();
    double n = 0.0;
    for (Index a = 0; a < dim(); ++a) n += popcount(static_cast<std::uint64_t>(a)) * m_(a, a).real();
    return n / L;
}

} // namespace qcp
