#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bamg {

using index_t = std::int32_t;

struct Triplet {
  index_t row = 0;
  index_t col = 0;
  double value = 0.0;
};

// Compressed sparse row matrix. Column indices within a row are sorted and
// duplicate-free; explicitly stored zeros are never kept. Immutable after
// construction apart from whole-matrix assignment.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(index_t nrows, index_t ncols);  // all-zero

  // Duplicates are summed; entries that are (or sum to) exactly zero are
  // dropped. Throws std::out_of_range on indices outside [0, n).
  static SparseMatrix from_triplets(index_t nrows, index_t ncols, std::vector<Triplet> ts);
  static SparseMatrix identity(index_t n);

  index_t rows() const { return nrows_; }
  index_t cols() const { return ncols_; }
  index_t nnz() const { return static_cast<index_t>(cols_.size()); }

  std::span<const index_t> row_cols(index_t i) const {
    return {cols_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }
  std::span<const double> row_vals(index_t i) const {
    return {vals_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }
  const std::vector<index_t>& row_ptr() const { return row_ptr_; }
  const std::vector<index_t>& col_idx() const { return cols_; }
  const std::vector<double>& values() const { return vals_; }

  double coeff(index_t i, index_t j) const;  // 0 if not stored

  void matvec(std::span<const double> x, std::span<double> y) const;  // y = A x
  std::vector<double> matvec(std::span<const double> x) const;

  SparseMatrix transpose() const;
  // C = A * rhs; entries with |c| < drop_tol * max|c| are dropped (exact zeros
  // always are). The relative drop keeps fill from exact cancellations out of
  // Galerkin triple products.
  SparseMatrix matmul(const SparseMatrix& rhs, double drop_tol = 1e-15) const;

  std::vector<double> diagonal() const;
  std::vector<double> column_sums() const;
  double max_abs() const;

  // Number of strongly connected components of the directed graph with an
  // edge (i, j) whenever i != j and the (i, j) entry is stored.
  index_t strong_components() const;

  bool structurally_equal(const SparseMatrix& o) const;

 private:
  index_t nrows_ = 0, ncols_ = 0;
  std::vector<index_t> row_ptr_ = {0};
  std::vector<index_t> cols_;
  std::vector<double> vals_;

  friend class SparseBuilder;
};

// Row-by-row CSR assembly for algorithms that produce sorted rows directly.
class SparseBuilder {
 public:
  SparseBuilder(index_t nrows, index_t ncols);
  // Entries must be appended with strictly increasing columns within a row.
  void append(index_t col, double value);
  void finish_row();
  SparseMatrix take();

 private:
  SparseMatrix m_;
  index_t rows_done_ = 0;
};

// B = I - A.
SparseMatrix identity_minus(const SparseMatrix& a);

// Coarse/fine splitting of {0, .., n-1}. cset and fset are sorted;
// coarse_pos/fine_pos give the position of each point inside its set (-1
// elsewhere).
struct CfPartition {
  index_t n = 0;
  std::vector<index_t> cset, fset;
  std::vector<index_t> coarse_pos, fine_pos;

  static CfPartition from_cset(index_t n, std::vector<index_t> cset);
  bool is_coarse(index_t i) const { return coarse_pos[i] >= 0; }
  index_t num_coarse() const { return static_cast<index_t>(cset.size()); }
  index_t num_fine() const { return static_cast<index_t>(fset.size()); }
  bool empty() const { return n == 0; }
};

// The four sub-blocks of M under a partition, each indexed by position in
// fset/cset.
struct BlockSplit {
  SparseMatrix ff, fc, cf, cc;
};
BlockSplit extract_blocks(const SparseMatrix& m, const CfPartition& part);

// Depth-limited directed reachability used to collect interpolatory sets:
// marks are timestamped so repeated queries on one matrix are O(visited).
class GraphWalker {
 public:
  explicit GraphWalker(const SparseMatrix& m);
  // Vertices j != i with target_mask[j] != 0 reachable from i by a directed
  // path of length <= depth (edges follow stored entries, diagonal ignored).
  // Sorted ascending.
  std::vector<index_t> collect(index_t i, int depth, std::span<const char> target_mask);

 private:
  const SparseMatrix* m_;
  std::vector<std::int32_t> mark_;
  std::int32_t gen_ = 0;
  std::vector<index_t> frontier_, next_, out_;
};

// One-shot convenience form of GraphWalker::collect.
std::vector<index_t> neighborhood(const SparseMatrix& m, index_t i, int depth,
                                  std::span<const index_t> targets);

}  // namespace bamg
