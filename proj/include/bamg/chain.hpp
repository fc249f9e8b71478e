#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bamg/sparse.hpp"

namespace bamg {

enum class ChainKind { uniform_grid, tandem_queue, planar_graph, external };
const char* chain_kind_name(ChainKind k);

// An irreducible Markov chain in column-stochastic convention: column j
// holds the outgoing transition probabilities of state j (A^t 1 = 1), so the
// stationary vector solves A x = x, i.e. B x = 0 with B = I - A.
struct ChainProblem {
  SparseMatrix a;
  index_t n = 0;
  ChainKind kind = ChainKind::external;
  int grid_dim = 0;                            // N for the N x N lattice families
  std::uint64_t seed = 0;                      // planar graphs
  std::vector<std::array<double, 2>> points;   // planar node coordinates
};

// Open two-stage tandem queue rates, normalized to sum to 1 in the defaults.
struct TandemRates {
  double arrival = 11.0 / 31.0;
  double stage1 = 10.0 / 31.0;
  double stage2 = 10.0 / 31.0;
};

// Random walk on the N x N 4-point lattice: each column j holds 1/deg(j) at
// the lattice neighbors of j.
ChainProblem gen_uniform_network(int n_side);

// Two queues in tandem, each truncated to N customers; transitions that
// would leave the grid are dropped and the remaining column renormalized.
// The directed flow makes parts of the spectrum genuinely complex.
ChainProblem gen_tandem_queue(int n_side, const TandemRates& rates = {});

// Random walk on the Delaunay triangulation of `num_points` uniform points
// in the unit square. Degenerate point sets (collinear/cocircular clashes)
// are retried with a tiny perturbation before giving up.
ChainProblem gen_planar_graph(int num_points, std::uint64_t seed);

// Deterministic variant on caller-supplied points (tests, reproducibility).
// Throws std::runtime_error if the point set has no valid triangulation.
ChainProblem gen_planar_from_points(std::vector<std::array<double, 2>> pts);

ChainProblem load_chain(const std::string& mtx_path);

// A' = (A - D)(I - D)^{-1} with D = diag(A): removes self transitions by
// rescaling each column; stationary vectors are preserved. Throws if some
// a_jj is 1 (absorbing state).
SparseMatrix strip_self_transitions(const SparseMatrix& a);

struct ValidationCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};
struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok() const;
  std::string to_string() const;
};

// Structural checks a chain must satisfy before the multilevel setup is
// meaningful: square, column-stochastic, entries in [0,1], zero diagonal,
// irreducible. Reports all findings; never repairs.
ValidationReport validate(const ChainProblem& p);

}  // namespace bamg
