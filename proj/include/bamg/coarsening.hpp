#pragma once

#include <vector>

#include "bamg/rng.hpp"
#include "bamg/smoothing.hpp"
#include "bamg/sparse.hpp"

namespace bamg {

struct CrParams {
  double theta = 0.85;   // candidate-set / convergence threshold
  int sweeps = 8;        // nu: F-relaxation sweeps per quality measurement
  double omega = 0.7;
  double init_lo = 1.0;  // random test-vector entries drawn from [lo, hi]
  double init_hi = 2.0;
};

// Full coarsening of an N x N lattice: C-points are the nodes with both
// coordinates even, giving an ((N+1)/2)^2 coarse grid. Requires N odd, >= 5.
CfPartition full_coarsen_grid(int n_side);

struct CrQuality {
  double rho = 0.0;            // (||u^nu|| / ||u^0||)^(1/nu)
  std::vector<double> ratios;  // per F-point |u_i^nu| / |u_i^(nu-1)|, fset order
};

// Measures how fast F-relaxation kills a random error: the asymptotic-rate
// estimate plus per-point convergence ratios used to pick new C candidates.
// An empty F-set yields rho = 0.
CrQuality cr_quality(const SparseMatrix& b, const CfPartition& part, const CrParams& params,
                     Rng& rng);

// Greedy independent set of the symmetrized adjacency of m restricted to
// `candidates`: highest degree first, ties to the lowest index. The result is
// maximal within the candidate set and sorted.
std::vector<index_t> greedy_independent_set(const SparseMatrix& m,
                                            const std::vector<index_t>& candidates);

struct CrResult {
  CfPartition part;
  double rho = 0.0;
  int passes = 0;
  bool full_c_warning = false;                    // C grew to all of Omega
  std::vector<std::pair<index_t, double>> trace;  // (|C|, rho) per pass
};

// Compatible-relaxation coarsening: grow C from c0 until the F-relaxation
// rate drops to theta. Slow points (ratio > theta) are candidates; each pass
// adds a greedy independent set of them.
CrResult cr_coarsen(const SparseMatrix& b, std::vector<index_t> c0, const CrParams& params,
                    Rng& rng);

}  // namespace bamg
