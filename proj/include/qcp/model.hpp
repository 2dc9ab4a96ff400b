#pragma once

// Spin-chain operators, the contact-process Hamiltonian, the Lindblad
// right-hand side and the column-stacked Liouvillian matrix.
//
// Basis convention: a basis state is an L-bit integer; site 0 (the leftmost
// site) is the most significant bit and a set bit means spin up, i.e. an
// occupied site with n = 1. Sites are 0-based throughout the API.

#include <iosfwd>
#include <vector>

#include "qcp/types.hpp"

namespace qcp {

inline constexpr int kMaxHilbertSites = 14;
inline constexpr int kMaxSuperoperatorSites = 10;

struct ModelParams {
    int L = 1;
    double omega = 0.0;  ///< coherent branching/coagulation rate
    double gamma = 1.0;  ///< local decay rate, sets the unit
    double h_x = 0.0;    ///< probe field coupled to sum_j sigma^x_j

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
    Index dim() const { return Index{1} << L; }
};

inline std::uint64_t site_bit(int L, int site) { return std::uint64_t{1} << (L - 1 - site); }

class SparseOperator {
public:
    using Storage = RowSparseXcd;

    SparseOperator() = default;
    explicit SparseOperator(Storage m);

    /// Duplicate (row, col) entries are summed.
    static SparseOperator from_triplets(Index dim, const std::vector<Eigen::Triplet<cplx>>& triplets);
    static SparseOperator identity(Index dim);

    Index dim() const { return m_.rows(); }
    const Storage& matrix() const { return m_; }
    cplx coeff(Index row, Index col) const { return m_.coeff(row, col); }

    /// max |A - A^dagger| over all entries.
    double hermiticity_defect() const;
    bool is_hermitian(double tol = 0.0) const { return hermiticity_defect() <= tol; }

    SparseOperator adjoint() const;
    Eigen::MatrixXcd to_dense() const { return Eigen::MatrixXcd(m_); }

    /// Coordinate triplets "row col re im", one per line. Debug output only.
    void write_triplets(std::ostream& os) const;

    friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
    friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
    friend SparseOperator operator*(cplx s, const SparseOperator& a);

private:
    Storage m_;
};

enum class SiteOp { sigma_x, sigma_y, sigma_z, sigma_plus, sigma_minus, number };

/// Single-site operator embedded in the 2^L-dimensional chain space.
SparseOperator site_operator(int L, int site, SiteOp op);

/// H = omega sum_j (sx_j n_{j+1} + n_j sx_{j+1}) + h_x sum_j sx_j
///     + omega * boundary_field * (sx_0 + sx_{L-1})   (open chain).
/// For L = 1 the two boundary terms act on the same site.
SparseOperator build_hamiltonian(const ModelParams& p, double boundary_field = 0.0);

/// d rho/dt = -i[H, rho] + gamma sum_j (s-_j rho s+_j - {n_j, rho}/2).
Eigen::MatrixXcd apply_lindblad_rhs(const ModelParams& p, const SparseOperator& H, const Eigen::MatrixXcd& rho);

/// Column-stacked matrix of the Liouvillian, vec(d rho/dt) = L vec(rho).
SparseOperator build_liouvillian_matrix(const ModelParams& p, double boundary_field = 0.0);

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho);
Eigen::MatrixXcd matricize(const Eigen::VectorXcd& v);

/// Hermitian, unit-trace state of a chain or a cluster.
class DensityMatrix {
public:
    DensityMatrix() = default;
    explicit DensityMatrix(Eigen::MatrixXcd m);

    static DensityMatrix product_state(int L, std::uint64_t basis_state);
    static DensityMatrix all_down(int L) { return product_state(L, 0); }
    static DensityMatrix all_up(int L) { return product_state(L, (std::uint64_t{1} << L) - 1); }
    /// Random full-rank mixed state, reproducible from the seed.
    static DensityMatrix random(int L, std::uint64_t seed);

    Index dim() const { return m_.rows(); }
    int sites() const;
    const Eigen::MatrixXcd& matrix() const { return m_; }

    double trace_error() const { return std::abs(m_.trace() - cplx(1.0)); }
    double hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }
    double min_eigenvalue() const;

    /// Throws NumericalError if trace or Hermiticity is off by more than tol.
    void check(double tol = 1e-8) const;

    double expectation(const SparseOperator& op) const;
    double population(int site) const;
    double mean_population() const;

private:
    Eigen::MatrixXcd m_;
};

} // namespace qcp
