#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "bamg/rng.hpp"
#include "bamg/sparse.hpp"

// Shared oracles and generators for the test suites. Everything here is
// written against plain dense loops (or Eigen where a test needs a reference
// eigensolve), independent of the library's sparse/multilevel code paths.
namespace testsup {

using bamg::index_t;
using bamg::SparseMatrix;
using bamg::Triplet;

struct Dense {
  int rows = 0, cols = 0;
  std::vector<double> a;
  Dense() = default;
  Dense(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

inline Dense to_dense(const SparseMatrix& m) {
  Dense d(m.rows(), m.cols());
  for (index_t i = 0; i < m.rows(); ++i) {
    auto cs = m.row_cols(i);
    auto vs = m.row_vals(i);
    for (std::size_t k = 0; k < cs.size(); ++k) d(i, cs[k]) = vs[k];
  }
  return d;
}

inline std::vector<double> dense_matvec(const Dense& d, const std::vector<double>& x) {
  std::vector<double> y(d.rows, 0.0);
  for (int i = 0; i < d.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < d.cols; ++j) s += d(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

inline Dense dense_matmul(const Dense& a, const Dense& b) {
  Dense c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const double av = a(i, k);
      if (av == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) c(i, j) += av * b(k, j);
    }
  return c;
}

inline double rel_err(const std::vector<double>& got, const std::vector<double>& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    num += (got[i] - want[i]) * (got[i] - want[i]);
    den += want[i] * want[i];
  }
  return std::sqrt(num) / (den > 0 ? std::sqrt(den) : 1.0);
}

inline double nrm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Random irreducible column-stochastic chain with zero diagonal: a random
// cycle through all states guarantees strong connectivity, plus extra edges.
inline SparseMatrix random_chain(index_t n, bamg::Rng& rng, int extra_per_node = 3) {
  std::vector<index_t> perm(n);
  for (index_t i = 0; i < n; ++i) perm[i] = i;
  for (index_t i = n - 1; i > 0; --i) {
    index_t j = static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[i], perm[j]);
  }
  std::vector<Triplet> ts;
  for (index_t k = 0; k < n; ++k) {
    index_t from = perm[k], to = perm[(k + 1) % n];
    if (from != to) ts.push_back({to, from, rng.uniform(0.5, 1.0)});
  }
  for (index_t j = 0; j < n; ++j)
    for (int e = 0; e < extra_per_node; ++e) {
      index_t i = static_cast<index_t>(rng.next_u64() % static_cast<std::uint64_t>(n));
      if (i != j) ts.push_back({i, j, rng.uniform(0.1, 1.0)});
    }
  // Column-normalize via a dense pass (duplicates were summed by from_triplets).
  SparseMatrix raw = SparseMatrix::from_triplets(n, n, std::move(ts));
  auto colsum = raw.column_sums();
  std::vector<Triplet> norm;
  for (index_t i = 0; i < n; ++i) {
    auto cs = raw.row_cols(i);
    auto vs = raw.row_vals(i);
    for (std::size_t k = 0; k < cs.size(); ++k)
      norm.push_back({i, cs[k], vs[k] / colsum[cs[k]]});
  }
  return SparseMatrix::from_triplets(n, n, std::move(norm));
}

}  // namespace testsup
