#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <set>

#include "bamg/chain.hpp"
#include "bamg/coarsening.hpp"
#include "support.hpp"

using namespace bamg;

namespace {

double dense_spectral_radius(const testsup::Dense& d) {
  Eigen::MatrixXd m(d.rows, d.cols);
  for (int i = 0; i < d.rows; ++i)
    for (int j = 0; j < d.cols; ++j) m(i, j) = d(i, j);
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  double r = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    r = std::max(r, std::abs(es.eigenvalues()(i)));
  return r;
}

}  // namespace

TEST_CASE("full_coarsen_grid: sizes, membership, recursion, input validation") {
  auto p5 = full_coarsen_grid(5);
  CHECK(p5.num_coarse() == 9);
  CHECK(p5.num_fine() == 16);
  // C-points are exactly the even-even lattice nodes.
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c)
      CHECK(p5.is_coarse(r * 5 + c) == (r % 2 == 0 && c % 2 == 0));

  CHECK(full_coarsen_grid(17).num_coarse() == 81);
  // 17 -> 9 -> 5 recursion: 289 -> 81 -> 25 points.
  CHECK(full_coarsen_grid(9).num_coarse() == 25);

  CHECK_THROWS_AS(full_coarsen_grid(8), std::invalid_argument);
  CHECK_THROWS_AS(full_coarsen_grid(3), std::invalid_argument);
}

TEST_CASE("cr_quality: empty F-set, plain-Jacobi limit, full coarsening passes") {
  auto b9 = identity_minus(gen_uniform_network(9).a);
  Rng rng(71);

  std::vector<index_t> all(81);
  for (index_t i = 0; i < 81; ++i) all[i] = i;
  auto q_allc = cr_quality(b9, CfPartition::from_cset(81, all), {}, rng);
  CHECK(q_allc.rho == 0.0);
  CHECK(q_allc.ratios.empty());

  // Empty C: the estimate is the plain damped-Jacobi rate, which is far above
  // theta on a lattice; compare against the dense spectral radius.
  auto q0 = cr_quality(b9, CfPartition::from_cset(81, {}), {}, rng);
  auto e = testsup::to_dense(b9);
  for (int i = 0; i < 81; ++i)
    for (int j = 0; j < 81; ++j) e(i, j) = (i == j ? 1.0 : 0.0) - 0.7 * e(i, j);
  const double rho_exact = dense_spectral_radius(e);
  CHECK(q0.rho > 0.85);
  CHECK(q0.rho <= 1.0 + 1e-12);
  CHECK(std::abs(q0.rho - rho_exact) <= 0.15);  // nu=8 power estimate is coarse

  // Full coarsening of the 17-grid is compatible: every F-point has a coarse
  // lattice neighbor, so F-relaxation is fast.
  auto b17 = identity_minus(gen_uniform_network(17).a);
  auto q17 = cr_quality(b17, full_coarsen_grid(17), {}, rng);
  CHECK(q17.rho <= 0.85);
}

TEST_CASE("greedy_independent_set: no edges, path tie-break, lattice properties") {
  auto diag = SparseMatrix::identity(6);
  std::vector<index_t> cand = {1, 3, 5};
  CHECK(greedy_independent_set(diag, cand) == cand);  // no edges: everything picked

  // Path 0-1-2: vertex 1 has the highest degree, picked first, excludes both ends.
  std::vector<Triplet> pts;
  for (index_t i = 0; i + 1 < 3; ++i) {
    pts.push_back({i, i + 1, 1.0});
    pts.push_back({i + 1, i, 1.0});
  }
  auto path = SparseMatrix::from_triplets(3, 3, pts);
  CHECK(greedy_independent_set(path, {0, 1, 2}) == std::vector<index_t>{1});

  // Lattice: result is independent (no two picked adjacent) and maximal
  // (every unpicked candidate has a picked neighbor).
  auto a = gen_uniform_network(9).a;
  std::vector<index_t> all(81);
  for (index_t i = 0; i < 81; ++i) all[i] = i;
  auto is = greedy_independent_set(a, all);
  std::set<index_t> inset(is.begin(), is.end());
  for (index_t u : is)
    for (index_t v : a.row_cols(u))
      if (v != u) CHECK(inset.count(v) == 0);
  for (index_t u : all) {
    if (inset.count(u)) continue;
    bool covered = false;
    for (index_t v : a.row_cols(u))
      if (v != u && inset.count(v)) covered = true;
    CHECK(covered);
  }
}

TEST_CASE("cr_coarsen: already-compatible input exits immediately") {
  auto i10 = SparseMatrix::identity(10);
  Rng rng(81);
  auto res = cr_coarsen(i10, {2, 5}, {}, rng);
  CHECK(res.part.cset == std::vector<index_t>{2, 5});
  CHECK(res.passes == 0);
  CHECK(res.rho <= 0.85);  // F-relaxation on I contracts by 1-omega per sweep
  CHECK_FALSE(res.full_c_warning);
}

TEST_CASE("cr_coarsen: lattice from scratch terminates with a modest C") {
  auto b = identity_minus(gen_uniform_network(17).a);
  Rng rng(91);
  auto res = cr_coarsen(b, {}, {}, rng);
  CHECK(res.rho <= 0.85);
  CHECK(res.passes <= 4);
  // One pass from scratch selects a maximal independent set; on an odd
  // lattice that can be the full checkerboard, ceil(n/2) = 145 points.
  CHECK(static_cast<double>(res.part.num_coarse()) / 289.0 <= 0.51);
  CHECK_FALSE(res.full_c_warning);
  // C grows monotonically across passes.
  for (std::size_t k = 1; k < res.trace.size(); ++k)
    CHECK(res.trace[k].first > res.trace[k - 1].first);

  // Determinism: same seed, same partition.
  Rng rng2(91);
  auto res2 = cr_coarsen(b, {}, {}, rng2);
  CHECK(res2.part.cset == res.part.cset);
}

TEST_CASE("cr_coarsen exit condition holds on random chains (property)") {
  Rng rng(101);
  for (int trial = 0; trial < 6; ++trial) {
    const index_t n = 20 + static_cast<index_t>(rng.next_u64() % 60);
    auto b = identity_minus(testsup::random_chain(n, rng));
    auto c0 = greedy_independent_set(b, [&] {
      std::vector<index_t> all(n);
      for (index_t i = 0; i < n; ++i) all[i] = i;
      return all;
    }());
    auto res = cr_coarsen(b, c0, {}, rng);
    CHECK((res.rho <= 0.85 || res.full_c_warning));
    CHECK(res.part.num_coarse() >= static_cast<index_t>(c0.size()));
  }
}
