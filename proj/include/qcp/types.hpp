#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qcp {

using cplx = std::complex<double>;
using Index = Eigen::Index;

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowSparseXd = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using RowSparseXcd = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Raised when an iterative or direct solver fails to meet its contract.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline int popcount(std::uint64_t x) { return __builtin_popcountll(x); }

} // namespace qcp
