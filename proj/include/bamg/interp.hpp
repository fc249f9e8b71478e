#pragma once

#include <vector>

#include "bamg/sparse.hpp"

namespace bamg {

struct LsParams {
  int caliber = 2;            // max interpolatory points per F-row
  int max_path = 3;           // neighborhood search depth cap
  double weight_floor = 1e-12;  // eps in 1/(||Bx||^2 + eps ||x||^2)
};

// Test vectors x^(0..r-1) with their least-squares weights. The state slot
// marks which vector tracks the stationary approximation across cycles.
struct TestVectorSet {
  std::vector<std::vector<double>> vectors;
  std::vector<double> weights;  // empty => computed from the operator on use
  int state_slot = 0;
};

// w_k = 1 / (||B x^k||_2^2 + eps ||x^k||_2^2): vectors the smoother has
// nearly killed count the most. Throws on a zero test vector.
std::vector<double> tv_weights(const SparseMatrix& b,
                               const std::vector<std::vector<double>>& vectors, double eps);

struct LsFit {
  std::vector<double> coeffs;  // aligned with J
  double loss = 0.0;           // min_p sum_k w_k (x_i^k - sum_j p_j x_j^k)^2
};

// Weighted least-squares fit of row i from the points J (fine indices).
// Rank-deficient normal systems fall back to the minimum-norm solution.
LsFit ls_fit_row(const std::vector<std::vector<double>>& vectors,
                 const std::vector<double>& weights, index_t i, const std::vector<index_t>& j);

struct InterpStats {
  index_t rows_depth2 = 0;          // F-rows that needed a depth-2 search
  index_t rows_depth3 = 0;
  double max_greedy_increase = 0.0;  // largest relative loss increase of a greedy step (<= 0 in exact arithmetic)
};

// Caliber-bounded interpolation by greedy per-row least squares: C-rows are
// identity; each F-row i picks up to `caliber` points from the coarse
// neighborhood reachable within max_path hops (depth grown until nonempty),
// one point per step, minimizing the weighted loss, ties to the lowest index.
// Throws std::runtime_error naming the point if an F-row has no coarse
// neighbor within max_path hops.
SparseMatrix build_interpolation(const SparseMatrix& b, const CfPartition& part,
                                 const TestVectorSet& tvs, const LsParams& params,
                                 InterpStats* stats = nullptr);

}  // namespace bamg
