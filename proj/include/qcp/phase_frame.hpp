#pragma once

// Real-arithmetic form of the master equation.
//
// With U = diag(i^{popcount(a)}) and rho = U r U^dagger the equation becomes
//   dr/dt = [K, r] + D(r),
// K real antisymmetric (K_ab = +H_ab when b has more up spins than a, -H_ab
// otherwise) and D the real dissipator. This needs every off-diagonal element
// of H to be real and to change the number of up spins by one, which holds for
// the contact-process Hamiltonian, the probe field and the cluster boundary
// field. The generator commutes with transposition, so real symmetric r (the
// image of a real-frame Hermitian state) and real antisymmetric r evolve
// independently.
//
// Packed sector vectors hold the upper triangle row by row with off-diagonal
// entries scaled by sqrt(2), which makes packing an isometry for the
// Frobenius norm. The antisymmetric sector has no diagonal.

#include <vector>

#include "qcp/model.hpp"

namespace qcp {

enum class Sector { symmetric, antisymmetric };

inline int sector_sign(Sector s) { return s == Sector::symmetric ? 1 : -1; }

class PhaseFrame {
public:
    PhaseFrame(const ModelParams& p, double boundary_field = 0.0);

    const ModelParams& params() const { return p_; }
    double boundary_field() const { return field_; }
    void set_boundary_field(double f);
    /// Probe amplitude of sum_j sigma^x_j; may be negative (finite differences).
    void set_probe(double h);
    double probe() const { return probe_; }

    Index dim() const { return N_; }
    Index sector_dim(Sector s) const;
    const RowSparseXd& generator() const { return K_; }

    /// out = [K, r] + D(r) for r with r^T = sign * r. out is resized as needed.
    void apply(const RowMatrixXd& r, RowMatrixXd& out, int sign) const;

    /// y = S x in the packed sector basis. Uses internal workspace, so a frame
    /// must not be shared between threads.
    void apply_packed(const Eigen::VectorXd& x, Eigen::VectorXd& y, Sector s) const;

    Eigen::VectorXd pack(const RowMatrixXd& r, Sector s) const;
    RowMatrixXd unpack(const Eigen::VectorXd& x, Sector s) const;

    /// Assembled sector generator, for direct factorizations at small L.
    Eigen::SparseMatrix<double> sector_matrix(Sector s) const;

    /// Linear functional x -> tr(r) on the packed symmetric sector.
    Eigen::VectorXd trace_functional() const;

    /// rho = U (r_sym + i r_anti) U^dagger. Either part may be empty (zero).
    Eigen::MatrixXcd to_density(const RowMatrixXd& r_sym, const RowMatrixXd& r_anti) const;
    /// Inverse of to_density: real symmetric and antisymmetric parts of U^dagger rho U.
    void from_density(const Eigen::MatrixXcd& rho, RowMatrixXd& r_sym, RowMatrixXd& r_anti) const;

    double population(const RowMatrixXd& r, int site) const;
    double mean_population(const RowMatrixXd& r) const;
    double trace(const RowMatrixXd& r) const { return r.diagonal().sum(); }
    /// sum_j <sigma^y_j> for symmetric r.
    double sigma_y_total(const RowMatrixXd& r) const;

    double packed_population(const Eigen::VectorXd& x, int site) const;
    double packed_mean_population(const Eigen::VectorXd& x) const;
    double packed_trace(const Eigen::VectorXd& x) const;
    double packed_sigma_y_total(const Eigen::VectorXd& x) const;

private:
    void build_generator();
    Index packed_index(Index a, Index b, Sector s) const;

    ModelParams p_;
    double field_ = 0.0;
    double probe_ = 0.0;
    Index N_ = 0;
    RowSparseXd K_;
    std::vector<std::uint64_t> site_bits_;
    std::vector<int> pop_;
    std::vector<Index> off_sym_, off_anti_;
    mutable RowMatrixXd kr_;
    mutable RowMatrixXd r_work_;
    mutable RowMatrixXd out_work_;
};

} // namespace qcp
