#include "bamg/hierarchy.hpp"

#include <stdexcept>
#include <string>

namespace bamg {

SparseMatrix averaging_restriction(const SparseMatrix& p) {
  const index_t nf = p.rows(), nc = p.cols();
  std::vector<char> col_used(static_cast<std::size_t>(nc), 0);
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(p.nnz()));
  for (index_t i = 0; i < nf; ++i) {
    auto cols = p.row_cols(i);
    if (cols.empty())
      throw std::runtime_error("averaging_restriction: interpolation row " + std::to_string(i) +
                               " is empty");
    const double share = 1.0 / static_cast<double>(cols.size());
    for (index_t j : cols) {
      col_used[static_cast<std::size_t>(j)] = 1;
      trips.push_back({j, i, share});
    }
  }
  for (index_t j = 0; j < nc; ++j)
    if (!col_used[static_cast<std::size_t>(j)])
      throw std::runtime_error("averaging_restriction: coarse point " + std::to_string(j) +
                               " is unused by interpolation");
  return SparseMatrix::from_triplets(nc, nf, trips);
}

SparseMatrix coarsen_operator(const SparseMatrix& q, const SparseMatrix& m,
                              const SparseMatrix& p) {
  return q.matmul(m.matmul(p));
}

std::vector<double> inject_restrict(const CfPartition& part, const std::vector<double>& x) {
  if (x.size() != static_cast<std::size_t>(part.n))
    throw std::invalid_argument("inject_restrict: size mismatch");
  std::vector<double> out;
  out.reserve(part.cset.size());
  for (index_t c : part.cset) out.push_back(x[static_cast<std::size_t>(c)]);
  return out;
}

void Hierarchy::finalize(double rcond) {
  if (levels.empty()) throw std::logic_error("Hierarchy::finalize: no levels");
  coarsest_pinv_ = pseudoinverse(DenseMatrix::from_sparse(levels.back().b), rcond);
  finalized_ = true;
}

const DenseMatrix& Hierarchy::coarsest_pinv() const {
  if (!finalized_) throw std::logic_error("Hierarchy: coarsest_pinv before finalize");
  return coarsest_pinv_;
}

double Hierarchy::operator_complexity() const {
  if (levels.empty()) return 0.0;
  double total = 0.0;
  for (const auto& level : levels) total += static_cast<double>(level.b.nnz());
  return total / static_cast<double>(levels.front().b.nnz());
}

std::vector<LevelStats> Hierarchy::stats() const {
  std::vector<LevelStats> out;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    LevelStats s;
    s.level = static_cast<index_t>(l);
    s.n = levels[l].b.rows();
    s.nnz = levels[l].b.nnz();
    s.grid_side = levels[l].grid_side;
    out.push_back(s);
  }
  return out;
}

}  // namespace bamg
