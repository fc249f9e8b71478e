#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bamg/chain.hpp"
#include "bamg/dense.hpp"
#include "bamg/hierarchy.hpp"
#include "bamg/krylov.hpp"
#include "bamg/mle.hpp"

namespace bamg {

// ---------------------------------------------------------------------------
// Dense operators for spectrum / field-of-values dumps. Every builder throws
// std::runtime_error when the dimension exceeds `limit`: the eigensolves are
// O(n^3) and the multigrid operators cost n V-cycle applications to assemble.
// ---------------------------------------------------------------------------

DenseMatrix dense_gated(const SparseMatrix& m, index_t limit = 1200);
// I - tau B, the damped-Richardson propagator.
DenseMatrix dense_tau_richardson(const SparseMatrix& b, double tau, index_t limit = 1200);
// C B, assembled column-by-column from vcycle_apply(h, B e_j).
DenseMatrix dense_mg_preconditioned(const Hierarchy& h, const SparseMatrix& b,
                                    const SmootherParams& smoother = {}, index_t limit = 1200);
// I - C B, the V-cycle error propagator.
DenseMatrix dense_mg_propagator(const Hierarchy& h, const SparseMatrix& b,
                                const SmootherParams& smoother = {}, index_t limit = 1200);

// All eigenvalues, sorted by (re, im) so repeated dumps are byte-identical.
std::vector<std::complex<double>> spectrum_sorted(const DenseMatrix& m);

struct FovPoint {
  double theta = 0.0;
  std::complex<double> value;
};

// Field-of-values boundary by the rotation method: for each angle
// theta_j = 2 pi j / angles, the extreme eigenvector v of the Hermitian part
// of e^{i theta} M yields the boundary point <v, M v>. The Hermitian part is
// treated as the real symmetric 2n x 2n embedding of cos(theta) S + i
// sin(theta) K (S, K the symmetric/skew parts of M) and its top eigenpair is
// found by a fully reorthogonalized Lanczos iteration, so each angle costs a
// few dozen O(n^2) products instead of an O(n^3) factorization.
std::vector<FovPoint> field_of_values_boundary(const DenseMatrix& m, int angles = 64);

// ---------------------------------------------------------------------------
// CSV writers: header row first, 17 significant digits, and never any timing
// data — repeated runs of the same configuration must be byte-identical.
// ---------------------------------------------------------------------------

void write_spectrum_csv(std::ostream& os, const std::vector<std::complex<double>>& eigs);
void write_fov_csv(std::ostream& os, const std::vector<FovPoint>& pts);
void write_setup_history_csv(std::ostream& os, const std::vector<MleCycleRecord>& h);
void write_krylov_history_csv(std::ostream& os, const std::vector<IterRecord>& h);
void write_levels_csv(std::ostream& os, const std::vector<LevelStats>& ls);

// ---------------------------------------------------------------------------
// Solve driver shared by the CLI and the tests.
// ---------------------------------------------------------------------------

enum class SolveMode { mle, pgmres, parnoldi, power, richardson };
const char* solve_mode_name(SolveMode m);
SolveMode parse_solve_mode(const std::string& s);  // throws std::invalid_argument

struct RunConfig {
  // Problem source: `input` (a MatrixMarket file) when set, otherwise a
  // generated family: uniform_grid / tandem_queue n_side x n_side lattices or
  // a planar graph on n_side points laid out from problem_seed.
  ChainKind kind = ChainKind::uniform_grid;
  int n_side = 17;
  std::uint64_t problem_seed = 1;
  std::string input;
  int grid_side_hint = 0;  // lattice side of a loaded chain (enables structured coarsening)

  SolveMode mode = SolveMode::mle;
  MleParams mle;
  KrylovParams krylov;
  double tau = 0.7;           // richardson baseline damping
  int baseline_iters = 50000; // power / richardson step cap
  std::string outdir;         // when set, run() writes history CSVs here
};

// Generate or load the chain described by the config.
ChainProblem make_problem(const RunConfig& cfg);

struct SolveReport {
  SolveMode mode = SolveMode::mle;
  std::string problem;
  index_t n = 0;
  bool converged = false;
  int setup_cycles = 0;      // adaptive cycles spent building the hierarchy
  int solve_iterations = 0;  // MLE cycles, Krylov iterations, or baseline steps
  double final_residual = 0.0;
  double operator_complexity = 0.0;
  std::vector<LevelStats> levels;
  std::vector<double> eig_estimates;  // pencil values tracked by the setup
  std::vector<MleCycleRecord> setup_history;
  std::vector<IterRecord> krylov_history;
  double wall_seconds = 0.0;  // text report only, never written to CSV
};

// Generate/load the problem, run the configured solver, optionally write
// history CSVs into cfg.outdir. Errors from any stage propagate with context.
SolveReport run(const RunConfig& cfg);
std::string format_report(const SolveReport& r);

// ---------------------------------------------------------------------------
// Results tables over a family of problem sizes.
// ---------------------------------------------------------------------------

struct SweepCell {
  int n_side = 0;
  index_t n = 0;
  int mle_cycles = -1;      // -1 marks a failed or non-converged phase
  int pgmres_iters = -1;
  int parnoldi_iters = -1;
  bool failed = false;
  std::string error;
};

struct SweepTable {
  ChainKind family = ChainKind::uniform_grid;
  std::vector<SweepCell> cells;
};

// For each size: a full adaptive MLE solve, plus one shared setup phase from
// which both pGMRES and pArnoldi run. A failing size is marked and the sweep
// continues with the remaining sizes.
SweepTable table_sweep(ChainKind family, const std::vector<int>& sizes, const RunConfig& base);
std::string format_table(const SweepTable& t);
void write_table_csv(std::ostream& os, const SweepTable& t);  // N,MLE,pGMRES,pArnoldi

}  // namespace bamg
