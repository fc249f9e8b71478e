#include "bamg/dense.hpp"

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>

namespace bamg {

namespace {

using EMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

EMap map_of(const DenseMatrix& m) { return EMap(m.data.data(), m.rows, m.cols); }

DenseMatrix from_eigen(const Eigen::MatrixXd& e) {
  DenseMatrix out(static_cast<index_t>(e.rows()), static_cast<index_t>(e.cols()));
  for (index_t i = 0; i < out.rows; ++i)
    for (index_t j = 0; j < out.cols; ++j) out.at(i, j) = e(i, j);
  return out;
}

}  // namespace

DenseMatrix DenseMatrix::identity(index_t n) {
  DenseMatrix m(n, n);
  for (index_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix& s) {
  DenseMatrix m(s.rows(), s.cols());
  for (index_t i = 0; i < s.rows(); ++i) {
    auto cols = s.row_cols(i);
    auto vals = s.row_vals(i);
    for (std::size_t k = 0; k < cols.size(); ++k) m.at(i, cols[k]) = vals[k];
  }
  return m;
}

std::vector<double> DenseMatrix::matvec(const std::vector<double>& x) const {
  if (x.size() != static_cast<std::size_t>(cols))
    throw std::invalid_argument("DenseMatrix::matvec: size mismatch");
  std::vector<double> y(static_cast<std::size_t>(rows), 0.0);
  for (index_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (index_t j = 0; j < cols; ++j) acc += at(i, j) * x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

DenseMatrix DenseMatrix::matmul(const DenseMatrix& other) const {
  if (cols != other.rows) throw std::invalid_argument("DenseMatrix::matmul: size mismatch");
  return from_eigen(map_of(*this) * map_of(other));
}

std::vector<EigPair> eig(const DenseMatrix& m) {
  if (m.rows != m.cols) throw std::invalid_argument("eig: matrix must be square");
  Eigen::EigenSolver<Eigen::MatrixXd> es(map_of(m));
  if (es.info() != Eigen::Success) throw std::runtime_error("eig: iteration failed to converge");
  const index_t n = m.rows;
  std::vector<EigPair> out(static_cast<std::size_t>(n));
  for (index_t k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)].value = es.eigenvalues()(k);
    auto& v = out[static_cast<std::size_t>(k)].vector;
    v.resize(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = es.eigenvectors()(i, k);
  }
  return out;
}

std::vector<std::complex<double>> eigenvalues(const DenseMatrix& m) {
  if (m.rows != m.cols) throw std::invalid_argument("eigenvalues: matrix must be square");
  Eigen::EigenSolver<Eigen::MatrixXd> es(map_of(m), /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigenvalues: iteration failed to converge");
  std::vector<std::complex<double>> out(static_cast<std::size_t>(m.rows));
  for (index_t k = 0; k < m.rows; ++k) out[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
  return out;
}

DenseMatrix pseudoinverse(const DenseMatrix& m, double rcond) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(map_of(m), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cutoff = (s.size() > 0 ? s(0) : 0.0) * rcond;
  Eigen::VectorXd sinv = s;
  for (Eigen::Index k = 0; k < s.size(); ++k) sinv(k) = s(k) > cutoff ? 1.0 / s(k) : 0.0;
  Eigen::MatrixXd pinv = svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose();
  return from_eigen(pinv);
}

double cond_svd(const DenseMatrix& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(map_of(m));
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0.0;
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

index_t rank(const DenseMatrix& m, double rel_tol) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(map_of(m));
  qr.setThreshold(rel_tol);
  return static_cast<index_t>(qr.rank());
}

std::vector<double> solve_lu(const DenseMatrix& a, const std::vector<double>& rhs) {
  if (a.rows != a.cols || rhs.size() != static_cast<std::size_t>(a.rows))
    throw std::invalid_argument("solve_lu: size mismatch");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(map_of(a));
  if (!lu.isInvertible()) throw std::runtime_error("solve_lu: matrix is singular");
  Eigen::VectorXd x = lu.solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), a.rows));
  return std::vector<double>(x.data(), x.data() + a.rows);
}

DenseMatrix solve_lu(const DenseMatrix& a, const DenseMatrix& rhs) {
  if (a.rows != a.cols || rhs.rows != a.rows)
    throw std::invalid_argument("solve_lu: size mismatch");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(map_of(a));
  if (!lu.isInvertible()) throw std::runtime_error("solve_lu: matrix is singular");
  return from_eigen(lu.solve(Eigen::MatrixXd(map_of(rhs))));
}

}  // namespace bamg
