#pragma once

#include <complex>
#include <vector>

#include "bamg/sparse.hpp"

namespace bamg {

// Small dense matrices for coarsest-level work and diagnostics. Row-major.
struct DenseMatrix {
  index_t rows = 0, cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(index_t r, index_t c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(index_t i, index_t j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double at(index_t i, index_t j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

  static DenseMatrix identity(index_t n);
  static DenseMatrix from_sparse(const SparseMatrix& m);

  std::vector<double> matvec(const std::vector<double>& x) const;
  DenseMatrix matmul(const DenseMatrix& other) const;
};

struct EigPair {
  std::complex<double> value;
  std::vector<std::complex<double>> vector;
};

// Eigendecomposition of a general real square matrix (unsorted).
std::vector<EigPair> eig(const DenseMatrix& m);
std::vector<std::complex<double>> eigenvalues(const DenseMatrix& m);

// Moore-Penrose pseudoinverse by SVD; singular values below
// rcond * sigma_max are treated as zero.
DenseMatrix pseudoinverse(const DenseMatrix& m, double rcond = 1e-12);

// sigma_max / sigma_min (inf if the smallest singular value is zero).
double cond_svd(const DenseMatrix& m);

// Numerical rank via column-pivoted QR with a relative threshold.
index_t rank(const DenseMatrix& m, double rel_tol = 1e-10);

// LU solves; throw std::runtime_error on a singular matrix.
std::vector<double> solve_lu(const DenseMatrix& a, const std::vector<double>& rhs);
DenseMatrix solve_lu(const DenseMatrix& a, const DenseMatrix& rhs);

}  // namespace bamg
