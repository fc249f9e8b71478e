#include "bamg/coarsening.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bamg/kernels.hpp"

namespace bamg {

CfPartition full_coarsen_grid(int n_side) {
  if (n_side < 5 || n_side % 2 == 0)
    throw std::invalid_argument("full_coarsen_grid needs odd N >= 5, got " +
                                std::to_string(n_side));
  std::vector<index_t> cset;
  cset.reserve(static_cast<std::size_t>((n_side / 2 + 1)) * (n_side / 2 + 1));
  for (int r = 0; r < n_side; r += 2)
    for (int c = 0; c < n_side; c += 2)
      cset.push_back(static_cast<index_t>(r) * n_side + c);
  return CfPartition::from_cset(static_cast<index_t>(n_side) * n_side, std::move(cset));
}

CrQuality cr_quality(const SparseMatrix& b, const CfPartition& part, const CrParams& params,
                     Rng& rng) {
  CrQuality q;
  const index_t nf = part.num_fine();
  if (nf == 0) return q;  // nothing to relax: perfectly compatible
  FRelax fr(b, part, params.omega);
  std::vector<double> u = rng.uniform_vec(nf, params.init_lo, params.init_hi);
  const double norm0 = kernels::nrm2(u.data(), nf);
  std::vector<double> prev;
  for (int s = 0; s < params.sweeps; ++s) {
    if (s == params.sweeps - 1) prev = u;
    fr.sweep(u);
  }
  const double norm_end = kernels::nrm2(u.data(), nf);
  q.rho = norm0 > 0 ? std::pow(norm_end / norm0, 1.0 / params.sweeps) : 0.0;
  q.ratios.resize(nf);
  for (index_t i = 0; i < nf; ++i)
    q.ratios[i] = std::abs(prev[i]) < 1e-14 ? 0.0 : std::abs(u[i]) / std::abs(prev[i]);
  return q;
}

std::vector<index_t> greedy_independent_set(const SparseMatrix& m,
                                            const std::vector<index_t>& candidates) {
  const index_t n = m.rows();
  std::vector<char> cand(n, 0);
  for (index_t c : candidates) {
    if (c < 0 || c >= n) throw std::out_of_range("independent-set candidate out of range");
    cand[c] = 1;
  }
  // Symmetrized adjacency restricted to candidates (direction must not decide
  // independence).
  const SparseMatrix mt = m.transpose();
  std::vector<std::vector<index_t>> adj(candidates.size());
  std::vector<index_t> slot(n, -1);
  for (std::size_t k = 0; k < candidates.size(); ++k) slot[candidates[k]] = static_cast<index_t>(k);
  std::vector<char> seen(n, 0);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const index_t u = candidates[k];
    auto absorb = [&](std::span<const index_t> row) {
      for (index_t v : row)
        if (v != u && cand[v] && !seen[v]) {
          seen[v] = 1;
          adj[k].push_back(v);
        }
    };
    absorb(m.row_cols(u));
    absorb(mt.row_cols(u));
    for (index_t v : adj[k]) seen[v] = 0;
  }
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (adj[a].size() != adj[b].size()) return adj[a].size() > adj[b].size();
    return candidates[a] < candidates[b];
  });
  std::vector<char> excluded(n, 0);
  std::vector<index_t> picked;
  for (std::size_t k : order) {
    const index_t u = candidates[k];
    if (excluded[u]) continue;
    picked.push_back(u);
    for (index_t v : adj[k]) excluded[v] = 1;
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

CrResult cr_coarsen(const SparseMatrix& b, std::vector<index_t> c0, const CrParams& params,
                    Rng& rng) {
  const index_t n = b.rows();
  if (b.rows() != b.cols()) throw std::invalid_argument("cr_coarsen needs a square matrix");
  std::sort(c0.begin(), c0.end());
  c0.erase(std::unique(c0.begin(), c0.end()), c0.end());
  CrResult res;
  std::vector<index_t> cset = std::move(c0);
  for (int pass = 0;; ++pass) {
    if (pass > n)
      throw std::logic_error("cr_coarsen failed to terminate");  // C grows every pass
    auto part = CfPartition::from_cset(n, cset);
    auto q = cr_quality(b, part, params, rng);
    res.trace.emplace_back(part.num_coarse(), q.rho);
    if (q.rho <= params.theta || part.num_fine() == 0) {
      res.part = std::move(part);
      res.rho = q.rho;
      res.passes = pass;
      res.full_c_warning = res.part.num_fine() == 0 && n > 0;
      return res;
    }
    // Slow-to-converge F-points are the new candidate set.
    std::vector<index_t> slow;
    for (index_t k = 0; k < part.num_fine(); ++k)
      if (q.ratios[k] > params.theta) slow.push_back(part.fset[k]);
    if (slow.empty()) {
      // rho says "too slow" but no single point crosses theta: take the worst
      // point so the loop still makes progress.
      index_t worst = 0;
      for (index_t k = 1; k < part.num_fine(); ++k)
        if (q.ratios[k] > q.ratios[worst]) worst = k;
      slow.push_back(part.fset[worst]);
    }
    auto is = greedy_independent_set(b, slow);
    if (is.empty()) is.push_back(slow.front());
    cset.insert(cset.end(), is.begin(), is.end());
    std::sort(cset.begin(), cset.end());
  }
}

}  // namespace bamg
