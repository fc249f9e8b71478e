#include "bamg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bamg/kernels.hpp"

namespace bamg {

SparseMatrix::SparseMatrix(index_t nrows, index_t ncols) : nrows_(nrows), ncols_(ncols) {
  if (nrows < 0 || ncols < 0) throw std::invalid_argument("negative matrix dimension");
  row_ptr_.assign(static_cast<std::size_t>(nrows) + 1, 0);
}

SparseMatrix SparseMatrix::from_triplets(index_t nrows, index_t ncols,
                                         std::vector<Triplet> ts) {
  SparseMatrix m(nrows, ncols);
  for (const auto& t : ts) {
    if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
      throw std::out_of_range("triplet index (" + std::to_string(t.row) + ", " +
                              std::to_string(t.col) + ") outside " + std::to_string(nrows) +
                              "x" + std::to_string(ncols));
  }
  std::sort(ts.begin(), ts.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  m.cols_.reserve(ts.size());
  m.vals_.reserve(ts.size());
  std::size_t k = 0;
  for (index_t i = 0; i < nrows; ++i) {
    while (k < ts.size() && ts[k].row == i) {
      index_t c = ts[k].col;
      double v = 0.0;
      while (k < ts.size() && ts[k].row == i && ts[k].col == c) v += ts[k++].value;
      if (v != 0.0) {
        m.cols_.push_back(c);
        m.vals_.push_back(v);
      }
    }
    m.row_ptr_[i + 1] = static_cast<index_t>(m.cols_.size());
  }
  return m;
}

SparseMatrix SparseMatrix::identity(index_t n) {
  SparseMatrix m(n, n);
  m.cols_.resize(n);
  m.vals_.assign(n, 1.0);
  for (index_t i = 0; i < n; ++i) {
    m.cols_[i] = i;
    m.row_ptr_[i + 1] = i + 1;
  }
  return m;
}

double SparseMatrix::coeff(index_t i, index_t j) const {
  auto cs = row_cols(i);
  auto it = std::lower_bound(cs.begin(), cs.end(), j);
  if (it == cs.end() || *it != j) return 0.0;
  return vals_[row_ptr_[i] + (it - cs.begin())];
}

void SparseMatrix::matvec(std::span<const double> x, std::span<double> y) const {
  if (static_cast<index_t>(x.size()) != ncols_ || static_cast<index_t>(y.size()) != nrows_)
    throw std::invalid_argument("matvec dimension mismatch");
  kernels::csr_spmv(nrows_, row_ptr_.data(), cols_.data(), vals_.data(), x.data(), y.data());
}

std::vector<double> SparseMatrix::matvec(std::span<const double> x) const {
  std::vector<double> y(nrows_);
  matvec(x, y);
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(ncols_, nrows_);
  t.cols_.resize(cols_.size());
  t.vals_.resize(vals_.size());
  std::vector<index_t> count(ncols_, 0);
  for (index_t c : cols_) count[c]++;
  for (index_t j = 0; j < ncols_; ++j) t.row_ptr_[j + 1] = t.row_ptr_[j] + count[j];
  std::vector<index_t> next(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  for (index_t i = 0; i < nrows_; ++i)
    for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      index_t pos = next[cols_[k]]++;
      t.cols_[pos] = i;  // ascending i per column => sorted rows in t
      t.vals_[pos] = vals_[k];
    }
  return t;
}

SparseMatrix SparseMatrix::matmul(const SparseMatrix& rhs, double drop_tol) const {
  if (ncols_ != rhs.nrows_) throw std::invalid_argument("matmul dimension mismatch");
  // Gustavson accumulation, then a second pass dropping |c| < drop_tol*max|c|.
  std::vector<std::vector<index_t>> rcols(nrows_);
  std::vector<std::vector<double>> rvals(nrows_);
  std::vector<double> acc(rhs.ncols_, 0.0);
  std::vector<index_t> marker(rhs.ncols_, -1);
  std::vector<index_t> touched;
  double maxabs = 0.0;
  for (index_t i = 0; i < nrows_; ++i) {
    touched.clear();
    for (index_t ka = row_ptr_[i]; ka < row_ptr_[i + 1]; ++ka) {
      const index_t k = cols_[ka];
      const double av = vals_[ka];
      for (index_t kb = rhs.row_ptr_[k]; kb < rhs.row_ptr_[k + 1]; ++kb) {
        const index_t j = rhs.cols_[kb];
        if (marker[j] != i) {
          marker[j] = i;
          acc[j] = 0.0;
          touched.push_back(j);
        }
        acc[j] += av * rhs.vals_[kb];
      }
    }
    std::sort(touched.begin(), touched.end());
    auto& rc = rcols[i];
    auto& rv = rvals[i];
    rc.reserve(touched.size());
    rv.reserve(touched.size());
    for (index_t j : touched) {
      rc.push_back(j);
      rv.push_back(acc[j]);
      maxabs = std::max(maxabs, std::abs(acc[j]));
    }
  }
  const double cut = drop_tol * maxabs;
  SparseMatrix c(nrows_, rhs.ncols_);
  for (index_t i = 0; i < nrows_; ++i) {
    for (std::size_t k = 0; k < rcols[i].size(); ++k) {
      const double v = rvals[i][k];
      if (v == 0.0 || std::abs(v) < cut) continue;
      c.cols_.push_back(rcols[i][k]);
      c.vals_.push_back(v);
    }
    c.row_ptr_[i + 1] = static_cast<index_t>(c.cols_.size());
  }
  return c;
}

std::vector<double> SparseMatrix::diagonal() const {
  const index_t n = std::min(nrows_, ncols_);
  std::vector<double> d(n, 0.0);
  for (index_t i = 0; i < n; ++i) d[i] = coeff(i, i);
  return d;
}

std::vector<double> SparseMatrix::column_sums() const {
  std::vector<double> s(ncols_, 0.0);
  for (index_t i = 0; i < nrows_; ++i)
    for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s[cols_[k]] += vals_[k];
  return s;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : vals_) m = std::max(m, std::abs(v));
  return m;
}

index_t SparseMatrix::strong_components() const {
  if (nrows_ != ncols_) throw std::invalid_argument("strong_components needs a square matrix");
  const index_t n = nrows_;
  // Iterative Tarjan.
  std::vector<index_t> idx(n, -1), low(n, 0), stck;
  std::vector<char> on(n, 0);
  index_t counter = 0, comps = 0;
  struct Frame {
    index_t v;
    index_t edge;
  };
  std::vector<Frame> call;
  stck.reserve(n);
  for (index_t root = 0; root < n; ++root) {
    if (idx[root] >= 0) continue;
    call.push_back({root, row_ptr_[root]});
    idx[root] = low[root] = counter++;
    stck.push_back(root);
    on[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      const index_t v = f.v;
      bool descended = false;
      while (f.edge < row_ptr_[v + 1]) {
        const index_t w = cols_[f.edge++];
        if (w == v) continue;  // self-loops are not graph edges
        if (idx[w] < 0) {
          idx[w] = low[w] = counter++;
          stck.push_back(w);
          on[w] = 1;
          call.push_back({w, row_ptr_[w]});
          descended = true;
          break;
        }
        if (on[w]) low[v] = std::min(low[v], idx[w]);
      }
      if (descended) continue;
      if (low[v] == idx[v]) {
        ++comps;
        index_t w;
        do {
          w = stck.back();
          stck.pop_back();
          on[w] = 0;
        } while (w != v);
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
  return comps;
}

bool SparseMatrix::structurally_equal(const SparseMatrix& o) const {
  return nrows_ == o.nrows_ && ncols_ == o.ncols_ && row_ptr_ == o.row_ptr_ &&
         cols_ == o.cols_;
}

SparseBuilder::SparseBuilder(index_t nrows, index_t ncols) : m_(nrows, ncols) {}

void SparseBuilder::append(index_t col, double value) {
  if (col < 0 || col >= m_.ncols_) throw std::out_of_range("SparseBuilder column out of range");
  if (m_.cols_.size() > static_cast<std::size_t>(m_.row_ptr_[rows_done_]) &&
      m_.cols_.back() >= col)
    throw std::logic_error("SparseBuilder columns must be strictly increasing within a row");
  if (value == 0.0) return;
  m_.cols_.push_back(col);
  m_.vals_.push_back(value);
}

void SparseBuilder::finish_row() {
  if (rows_done_ >= m_.nrows_) throw std::logic_error("SparseBuilder: too many rows");
  ++rows_done_;
  m_.row_ptr_[rows_done_] = static_cast<index_t>(m_.cols_.size());
}

SparseMatrix SparseBuilder::take() {
  if (rows_done_ != m_.nrows_) throw std::logic_error("SparseBuilder: not all rows finished");
  return std::move(m_);
}

SparseMatrix identity_minus(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("identity_minus needs a square matrix");
  std::vector<Triplet> ts;
  ts.reserve(a.nnz() + a.rows());
  for (index_t i = 0; i < a.rows(); ++i) {
    ts.push_back({i, i, 1.0});
    auto cs = a.row_cols(i);
    auto vs = a.row_vals(i);
    for (std::size_t k = 0; k < cs.size(); ++k) ts.push_back({i, cs[k], -vs[k]});
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(ts));
}

CfPartition CfPartition::from_cset(index_t n, std::vector<index_t> cset) {
  std::sort(cset.begin(), cset.end());
  cset.erase(std::unique(cset.begin(), cset.end()), cset.end());
  if (!cset.empty() && (cset.front() < 0 || cset.back() >= n))
    throw std::out_of_range("coarse index outside [0, n)");
  CfPartition p;
  p.n = n;
  p.cset = std::move(cset);
  p.coarse_pos.assign(n, -1);
  p.fine_pos.assign(n, -1);
  for (std::size_t k = 0; k < p.cset.size(); ++k) p.coarse_pos[p.cset[k]] = static_cast<index_t>(k);
  p.fset.reserve(n - p.cset.size());
  for (index_t i = 0; i < n; ++i)
    if (p.coarse_pos[i] < 0) {
      p.fine_pos[i] = static_cast<index_t>(p.fset.size());
      p.fset.push_back(i);
    }
  return p;
}

BlockSplit extract_blocks(const SparseMatrix& m, const CfPartition& part) {
  if (m.rows() != part.n || m.cols() != part.n)
    throw std::invalid_argument("extract_blocks: partition size mismatch");
  SparseBuilder ff(part.num_fine(), part.num_fine());
  SparseBuilder fc(part.num_fine(), part.num_coarse());
  SparseBuilder cf(part.num_coarse(), part.num_fine());
  SparseBuilder cc(part.num_coarse(), part.num_coarse());
  // Rows visited in ascending order visit fset/cset rows in their induced
  // order, and sorted columns stay sorted under the monotone position maps.
  for (index_t i = 0; i < part.n; ++i) {
    auto cs = m.row_cols(i);
    auto vs = m.row_vals(i);
    const bool ic = part.is_coarse(i);
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const index_t j = cs[k];
      if (part.is_coarse(j)) {
        (ic ? cc : fc).append(part.coarse_pos[j], vs[k]);
      } else {
        (ic ? cf : ff).append(part.fine_pos[j], vs[k]);
      }
    }
    if (ic) {
      cc.finish_row();
      cf.finish_row();
    } else {
      ff.finish_row();
      fc.finish_row();
    }
  }
  return {ff.take(), fc.take(), cf.take(), cc.take()};
}

GraphWalker::GraphWalker(const SparseMatrix& m) : m_(&m), mark_(m.rows(), 0) {}

std::vector<index_t> GraphWalker::collect(index_t i, int depth,
                                          std::span<const char> target_mask) {
  ++gen_;
  out_.clear();
  frontier_.clear();
  frontier_.push_back(i);
  mark_[i] = gen_;
  for (int d = 0; d < depth && !frontier_.empty(); ++d) {
    next_.clear();
    for (index_t u : frontier_) {
      for (index_t v : m_->row_cols(u)) {
        if (v == u || mark_[v] == gen_) continue;
        mark_[v] = gen_;
        next_.push_back(v);
        if (target_mask[v]) out_.push_back(v);
      }
    }
    frontier_.swap(next_);
  }
  std::sort(out_.begin(), out_.end());
  return out_;
}

std::vector<index_t> neighborhood(const SparseMatrix& m, index_t i, int depth,
                                  std::span<const index_t> targets) {
  std::vector<char> mask(m.rows(), 0);
  for (index_t t : targets) mask[t] = 1;
  GraphWalker w(m);
  return w.collect(i, depth, mask);
}

}  // namespace bamg
