#include "bamg/interp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "bamg/kernels.hpp"

namespace bamg {

std::vector<double> tv_weights(const SparseMatrix& b,
                               const std::vector<std::vector<double>>& vectors, double eps) {
  std::vector<double> w(vectors.size());
  std::vector<double> bx(static_cast<std::size_t>(b.rows()));
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    const auto& x = vectors[k];
    if (x.size() != static_cast<std::size_t>(b.cols()))
      throw std::invalid_argument("tv_weights: test vector size mismatch");
    const double xx = kernels::dot(x.data(), x.data(), x.size());
    if (xx == 0.0) throw std::invalid_argument("tv_weights: zero test vector " + std::to_string(k));
    b.matvec(x, bx);
    const double rr = kernels::dot(bx.data(), bx.data(), bx.size());
    w[k] = 1.0 / (rr + eps * xx);
  }
  return w;
}

LsFit ls_fit_row(const std::vector<std::vector<double>>& vectors,
                 const std::vector<double>& weights, index_t i, const std::vector<index_t>& j) {
  const std::size_t r = vectors.size();
  if (weights.size() != r) throw std::invalid_argument("ls_fit_row: weight count mismatch");
  const std::size_t m = j.size();

  // Weighted tall system: row k is sqrt(w_k) [x^k_{J_1} .. x^k_{J_m} | x^k_i],
  // so loss(p) = sum_k w_k (x^k_i - sum_q p_q x^k_{J_q})^2.
  LsFit fit;
  fit.coeffs.assign(m, 0.0);
  if (m > 0) {
    Eigen::MatrixXd g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m));
    Eigen::VectorXd t(static_cast<Eigen::Index>(r));
    for (std::size_t k = 0; k < r; ++k) {
      const double sw = std::sqrt(weights[k]);
      t(static_cast<Eigen::Index>(k)) = sw * vectors[k][static_cast<std::size_t>(i)];
      for (std::size_t p = 0; p < m; ++p)
        g(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(p)) =
            sw * vectors[k][static_cast<std::size_t>(j[p])];
    }
    if (m == 1) {
      const double denom = g.col(0).squaredNorm();
      fit.coeffs[0] = denom > 0.0 ? g.col(0).dot(t) / denom : 0.0;
    } else {
      // Solve the tall system orthogonally, never through the normal
      // equations: the weights span up to ~1e12 between the state vector and
      // a fresh random vector, and squaring that conditioning would cost
      // nine digits of the coefficients — a noise floor far above the
      // interpolation quality the state vector needs. Complete orthogonal
      // decomposition also yields the minimum-norm solution for dependent
      // columns (coincident points).
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(g);
      const Eigen::VectorXd coeffs = cod.solve(t);
      for (std::size_t p = 0; p < m; ++p) fit.coeffs[p] = coeffs(static_cast<Eigen::Index>(p));
    }
  }

  // Residual-form loss: each term is nonnegative, so the large-weight terms
  // cannot cancel against each other and bury the small ones.
  double loss = 0.0;
  for (std::size_t k = 0; k < r; ++k) {
    double resid = vectors[k][static_cast<std::size_t>(i)];
    for (std::size_t p = 0; p < m; ++p)
      resid -= fit.coeffs[p] * vectors[k][static_cast<std::size_t>(j[p])];
    loss += weights[k] * resid * resid;
  }
  fit.loss = loss;
  return fit;
}

SparseMatrix build_interpolation(const SparseMatrix& b, const CfPartition& part,
                                 const TestVectorSet& tvs, const LsParams& params,
                                 InterpStats* stats) {
  const index_t n = b.rows();
  if (b.cols() != n) throw std::invalid_argument("build_interpolation: operator must be square");
  if (part.n != n) throw std::invalid_argument("build_interpolation: partition size mismatch");
  if (tvs.vectors.empty()) throw std::invalid_argument("build_interpolation: no test vectors");
  if (params.caliber < 1) throw std::invalid_argument("build_interpolation: caliber must be >= 1");

  std::vector<double> weights = tvs.weights;
  if (weights.empty()) weights = tv_weights(b, tvs.vectors, params.weight_floor);
  if (weights.size() != tvs.vectors.size())
    throw std::invalid_argument("build_interpolation: weight count mismatch");

  InterpStats local;
  GraphWalker walker(b);
  std::vector<Triplet> trips;
  const index_t nc = part.num_coarse();
  std::vector<char> coarse_mask(static_cast<std::size_t>(n), 0);
  for (index_t c : part.cset) coarse_mask[static_cast<std::size_t>(c)] = 1;

  for (index_t i = 0; i < n; ++i) {
    if (part.is_coarse(i)) {
      trips.push_back({i, part.coarse_pos[static_cast<std::size_t>(i)], 1.0});
      continue;
    }
    // Candidate coarse set: grow the directed search radius until it offers
    // at least caliber-many coarse points (or the cap is hit). Stopping at
    // the first nonempty shell instead would leave rows of strongly directed
    // chains with a single candidate, silently degrading every fit to
    // caliber one no matter the requested caliber.
    std::vector<index_t> candidates;
    int depth_used = 0;
    for (int depth = 1; depth <= params.max_path; ++depth) {
      candidates = walker.collect(i, depth, coarse_mask);
      depth_used = depth;
      if (static_cast<int>(candidates.size()) >= params.caliber) break;
    }
    if (candidates.empty())
      throw std::runtime_error("build_interpolation: point " + std::to_string(i) +
                               " has no coarse neighbor within " + std::to_string(params.max_path) +
                               " hops");
    if (depth_used == 2) ++local.rows_depth2;
    if (depth_used >= 3) ++local.rows_depth3;

    // Greedy caliber growth: add the candidate that minimizes the fitted
    // loss, ties to the lowest coarse index (candidates are ascending).
    std::vector<index_t> chosen;
    std::vector<double> chosen_coeffs;
    double prev_loss = std::numeric_limits<double>::infinity();
    const int caliber = std::min<int>(params.caliber, static_cast<int>(candidates.size()));
    std::vector<index_t> trial;
    for (int step = 0; step < caliber; ++step) {
      double best_loss = std::numeric_limits<double>::infinity();
      std::size_t best_pos = candidates.size();
      LsFit best_fit;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (candidates[c] < 0) continue;  // already chosen
        trial = chosen;
        trial.push_back(candidates[c]);
        LsFit fit = ls_fit_row(tvs.vectors, weights, i, trial);
        if (fit.loss < best_loss) {
          best_loss = fit.loss;
          best_pos = c;
          best_fit = std::move(fit);
        }
      }
      if (best_pos == candidates.size()) break;
      if (step > 0 && prev_loss > 0.0) {
        const double rel_inc = (best_loss - prev_loss) / prev_loss;
        local.max_greedy_increase = std::max(local.max_greedy_increase, rel_inc);
      }
      chosen.push_back(candidates[best_pos]);
      chosen_coeffs = std::move(best_fit.coeffs);
      prev_loss = best_loss;
      candidates[best_pos] = -1;
    }

    for (std::size_t p = 0; p < chosen.size(); ++p) {
      if (chosen_coeffs[p] == 0.0) continue;
      trips.push_back({i, part.coarse_pos[static_cast<std::size_t>(chosen[p])], chosen_coeffs[p]});
    }
  }

  if (stats != nullptr) *stats = local;
  return SparseMatrix::from_triplets(n, nc, trips);
}

}  // namespace bamg
