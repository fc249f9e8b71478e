#pragma once

#include <cstdint>
#include <vector>

#include "bamg/coarsening.hpp"
#include "bamg/hierarchy.hpp"
#include "bamg/interp.hpp"
#include "bamg/rng.hpp"
#include "bamg/smoothing.hpp"
#include "bamg/sparse.hpp"

namespace bamg {

enum class CoarseningMode {
  automatic,   // structured when a lattice side is known, else CR
  structured,  // full coarsening of an N x N lattice
  cr,          // compatible relaxation
};

struct MleParams {
  int num_tvs = 6;    // least-squares test vectors carried on the finest level
  int num_eigs = 6;   // eigenpairs tracked through the cycle
  int mu = 1;         // coarse visits per level (1 = V-cycle)
  int setup_cycles = 1;
  double delta = 0.05;  // relative eigenvalue movement that flags a pair unconverged
  double tol = 1e-8;    // ||B x / ||x|| || target for the adaptive solver
  int max_cycles = 64;
  index_t coarsest_size = 30;
  int max_levels = 0;  // 0 = until coarsest_size is reached
  index_t dense_eig_limit = 1200;
  CoarseningMode coarsening = CoarseningMode::automatic;
  bool cr_from_scratch = false;  // CR: start from an empty C instead of an independent set
  SmootherParams smoother;
  LsParams ls;
  CrParams cr;
  std::uint64_t seed = 0;
};

// Real-stored eigenpair approximation of the pencil B x = lambda T x. A
// complex conjugate pair occupies two slots holding Re(v) and Im(v); both
// carry value = Re(lambda) and imag_mag = |Im(lambda)|.
struct MleEigen {
  double value = 0.0;
  double imag_mag = 0.0;
  std::vector<double> vector;
};

struct MleCycleRecord {
  int cycle = 0;
  double residual = 0.0;           // ||B_0 x / ||x|| ||_2 for the state pair
  std::vector<double> eig_values;  // pair values after the finest Rayleigh update
};

struct MleResult {
  std::vector<double> x;  // unit 2-norm, positive-sum stationary approximation
  bool converged = false;
  int cycles = 0;
  std::vector<MleCycleRecord> history;
};

// Rayleigh quotient <B x, x> / <T x, x>; throws std::runtime_error when the
// denominator vanishes relative to ||T x|| ||x||.
double rayleigh_quotient(const SparseMatrix& b, const SparseMatrix& t,
                         std::span<const double> x);

// Dense eigensolve of the pencil (B, T) at the coarsest level: the num
// smallest-modulus eigenpairs of T^{-1} B, smallest pinned to exactly zero
// with a positive-sum real vector. Conjugate pairs are split into Re/Im
// slots (extending by one slot when a pair straddles the cutoff). Throws if
// n exceeds dense_limit or T is numerically singular.
std::vector<MleEigen> coarsest_eigensolve(const SparseMatrix& b, const SparseMatrix& t, int num,
                                          index_t dense_limit);

// Bootstrap multilevel eigensolver. Drives adaptive setup cycles that build
// the operator hierarchy from its own least-squares test vectors, and can
// run on as an adaptive eigensolver until the stationary residual meets tol.
class MleEngine {
 public:
  MleEngine(SparseMatrix b0, const MleParams& params, index_t grid_side = 0);

  // One full cycle: descend building transfers from the current test
  // vectors, dense-solve the coarsest pencil, ascend refining eigenpairs.
  // Returns the finest-level stationary residual after the cycle.
  double cycle();

  // setup_cycles cycles, then transfers/operators are rebuilt from the final
  // test vectors and the coarsest pseudoinverse is cached: after this the
  // hierarchy is ready for V-cycle preconditioning.
  void run_setup();

  // Cycle until the stationary residual reaches params.tol or max_cycles.
  // Includes the cycles already run by run_setup in the budget accounting
  // only if run_setup was called first (history is shared).
  MleResult run_mle_solve();

  const Hierarchy& hierarchy() const { return hierarchy_; }
  Hierarchy& hierarchy() { return hierarchy_; }
  const std::vector<MleCycleRecord>& history() const { return history_; }
  const std::vector<MleEigen>& eigenpairs() const { return pairs_; }
  // Eigenvalues straight off the coarsest solve of the last cycle, before
  // the ascent's Rayleigh refinement (finest-level movement diagnostics).
  const std::vector<double>& values_before_refinement() const { return lam_before_; }
  // ||(B - lambda_i I) v_i|| per pair on the finest level (unit v_i).
  std::vector<double> eigen_residuals() const;
  // Current stationary approximation, normalized to unit sum.
  std::vector<double> stationary() const;
  double residual() const;  // ||B x / ||x|| ||_2 for the current state vector
  int cycles_run() const { return cycle_count_; }

 private:
  struct LevelWork {
    SparseMatrix b, t, p, q;
    CfPartition part;
    bool part_frozen = false;
    index_t grid_side = 0;
    std::vector<std::vector<double>> u;  // test vectors on this level
  };

  bool is_coarsest(std::size_t l) const;
  void ensure_partition(std::size_t l);
  std::vector<MleEigen> mle(std::size_t l);
  void rebuild_operators();
  void publish_hierarchy();

  MleParams params_;
  Rng rng_;
  std::vector<LevelWork> levels_;
  Hierarchy hierarchy_;
  std::vector<MleEigen> pairs_;
  std::vector<double> lam_before_;
  std::vector<char> tv_flagged_;  // pairs added to the test-vector set (sticky)
  std::vector<MleCycleRecord> history_;
  int cycle_count_ = 0;
};

}  // namespace bamg
