#pragma once

#include <vector>

#include "bamg/dense.hpp"
#include "bamg/sparse.hpp"

namespace bamg {

// Averaging restriction: Q has the pattern of P^t, and every nonzero in
// Q's column i equals 1/(nnz of P row i), so column sums of Q are exactly 1
// and Q P acts as a weighted identity on the coarse space. Throws if some P
// row is empty (a point interpolating from nothing) or some P column is
// empty (a coarse point no fine point draws from).
SparseMatrix averaging_restriction(const SparseMatrix& p);

// Galerkin-style triple product with the averaging restriction: Q (M P).
SparseMatrix coarsen_operator(const SparseMatrix& q, const SparseMatrix& m,
                              const SparseMatrix& p);

// Injection: keep the entries of x at the coarse points, in cset order.
std::vector<double> inject_restrict(const CfPartition& part, const std::vector<double>& x);

// One level of the multilevel hierarchy. On the coarsest level only b and t
// are populated; elsewhere p/q map to the next coarser level and part
// records the C/F split that produced them.
struct Level {
  SparseMatrix b;  // level operator
  SparseMatrix t;  // accumulated transfer (finest: identity)
  SparseMatrix p;  // interpolation from level l+1
  SparseMatrix q;  // averaging restriction to level l+1
  CfPartition part;
  index_t grid_side = 0;  // lattice side when the level is structured, else 0
};

struct LevelStats {
  index_t level = 0;
  index_t n = 0;
  index_t nnz = 0;
  index_t grid_side = 0;
};

class Hierarchy {
 public:
  std::vector<Level> levels;

  index_t num_levels() const { return static_cast<index_t>(levels.size()); }
  const Level& finest() const { return levels.front(); }
  const Level& coarsest() const { return levels.back(); }

  // Cache the Moore-Penrose pseudoinverse of the coarsest operator (the
  // V-cycle's exact-solve bottom). Must be called before vcycle use.
  void finalize(double rcond = 1e-12);
  bool finalized() const { return finalized_; }
  const DenseMatrix& coarsest_pinv() const;

  // sum_l nnz(B_l) / nnz(B_0).
  double operator_complexity() const;
  std::vector<LevelStats> stats() const;

 private:
  DenseMatrix coarsest_pinv_;
  bool finalized_ = false;
};

}  // namespace bamg
