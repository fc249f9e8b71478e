#include "doctest.h"

#include <cmath>

#include "bamg/chain.hpp"
#include "bamg/smoothing.hpp"
#include "support.hpp"

using namespace bamg;
using testsup::Dense;
using testsup::to_dense;

namespace {

// Dense damped-Jacobi error propagator E = I - omega D^{-1} M.
Dense jacobi_propagator(const SparseMatrix& m, double omega) {
  auto md = to_dense(m);
  Dense e(md.rows, md.cols);
  for (int i = 0; i < md.rows; ++i) {
    const double dinv = 1.0 / md(i, i);
    for (int j = 0; j < md.cols; ++j)
      e(i, j) = (i == j ? 1.0 : 0.0) - omega * dinv * md(i, j);
  }
  return e;
}

}  // namespace

TEST_CASE("jacobi_sweep: identity matrix contracts by 1-omega, fixed point is exact") {
  auto i4 = SparseMatrix::identity(4);
  std::vector<double> x = {1.0, -2.0, 4.0, 0.5};
  auto x0 = x;
  std::vector<double> zero(4, 0.0);
  jacobi_sweep(i4, x, zero, {0.7, 1});
  for (int i = 0; i < 4; ++i) CHECK(x[i] == doctest::Approx(0.3 * x0[i]).epsilon(1e-15));

  Rng rng(3);
  auto b = identity_minus(testsup::random_chain(20, rng));
  auto xstar = rng.uniform_vec(20, -1.0, 1.0);
  auto rhs = b.matvec(xstar);
  auto x1 = xstar;
  jacobi_sweep(b, x1, rhs, {0.7, 5});
  CHECK(x1 == xstar);  // residual is bitwise zero, iterate cannot move
}

TEST_CASE("jacobi_sweep matches the dense error propagator") {
  Rng rng(11);
  auto bmat = identity_minus(testsup::random_chain(15, rng));
  auto e = jacobi_propagator(bmat, 0.7);
  auto x = rng.uniform_vec(15, -1.0, 1.0);
  auto want = x;
  for (int s = 0; s < 3; ++s) want = testsup::dense_matvec(e, want);
  std::vector<double> zero(15, 0.0);
  auto got = x;
  jacobi_sweep(bmat, got, zero, {0.7, 3});
  CHECK(testsup::rel_err(got, want) <= 1e-13);
}

TEST_CASE("jacobi_sweep rejects zero diagonals by row") {
  auto swap = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
  std::vector<double> x = {1.0, 1.0}, b = {0.0, 0.0};
  CHECK_THROWS_WITH_AS(jacobi_sweep(swap, x, b, {0.7, 1}), doctest::Contains("row 0"),
                       std::runtime_error);
}

TEST_CASE("f_relax_sweep: degenerate partitions and C-invariance") {
  Rng rng(23);
  auto bmat = identity_minus(testsup::random_chain(18, rng));
  auto u = rng.uniform_vec(18, 1.0, 2.0);

  // All points coarse: nothing moves.
  std::vector<index_t> all(18);
  for (index_t i = 0; i < 18; ++i) all[i] = i;
  auto uc = u;
  f_relax_sweep(bmat, CfPartition::from_cset(18, all), uc, {0.7, 4});
  CHECK(uc == u);

  // No coarse points: identical (bitwise) to homogeneous Jacobi.
  auto uf = u;
  f_relax_sweep(bmat, CfPartition::from_cset(18, {}), uf, {0.7, 4});
  auto uj = u;
  std::vector<double> zero(18, 0.0);
  jacobi_sweep(bmat, uj, zero, {0.7, 4});
  CHECK(uf == uj);

  // Mixed partition: C entries bitwise untouched.
  std::vector<index_t> cset = {0, 3, 4, 9, 17};
  auto part = CfPartition::from_cset(18, cset);
  auto um = u;
  f_relax_sweep(bmat, part, um, {0.7, 3});
  for (index_t c : cset) CHECK(um[c] == u[c]);
}

TEST_CASE("f_relax_sweep matches the dense F-block propagator on a lattice") {
  auto prob = gen_uniform_network(9);
  auto bmat = identity_minus(prob.a);
  std::vector<index_t> cset;
  for (int r = 0; r < 9; r += 2)
    for (int c = 0; c < 9; c += 2) cset.push_back(r * 9 + c);
  auto part = CfPartition::from_cset(81, cset);

  Rng rng(31);
  auto u = rng.uniform_vec(81, 1.0, 2.0);
  auto got = u;
  f_relax_sweep(bmat, part, got, {0.7, 8});

  auto bff = extract_blocks(bmat, part).ff;
  auto e = jacobi_propagator(bff, 0.7);
  std::vector<double> ufv(part.num_fine());
  for (std::size_t k = 0; k < ufv.size(); ++k) ufv[k] = u[part.fset[k]];
  for (int s = 0; s < 8; ++s) ufv = testsup::dense_matvec(e, ufv);
  for (std::size_t k = 0; k < ufv.size(); ++k)
    CHECK(got[part.fset[k]] == doctest::Approx(ufv[k]).epsilon(1e-12));
}

TEST_CASE("shifted_relax: lambda=0 equals homogeneous Jacobi bitwise") {
  Rng rng(41);
  auto bmat = identity_minus(testsup::random_chain(25, rng));
  auto t = SparseMatrix::identity(25);
  auto x1 = rng.uniform_vec(25, -1.0, 1.0);
  auto x2 = x1;
  int skipped = shifted_relax(bmat, t, 0.0, x1, {0.7, 3});
  CHECK(skipped == 0);
  std::vector<double> zero(25, 0.0);
  jacobi_sweep(bmat, x2, zero, {0.7, 3});
  CHECK(x1 == x2);
}

TEST_CASE("shifted_relax: exact eigenpair is a fixed point, skip counting works") {
  // B = [[1,-1],[-1,1]] has eigenpair (2, (1,-1)).
  auto bmat = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, -1.0},
                                                 {1, 0, -1.0}, {1, 1, 1.0}});
  auto t = SparseMatrix::identity(2);
  std::vector<double> v = {1.0, -1.0};
  auto v0 = v;
  shifted_relax(bmat, t, 2.0, v, {0.7, 4});
  CHECK(v == v0);

  // lambda equal to every shifted diagonal: all rows skipped, nothing moves.
  std::vector<double> w = {0.3, 0.8};
  auto w0 = w;
  int skipped = shifted_relax(bmat, t, 1.0, w, {0.7, 2});
  CHECK(skipped == 2);
  CHECK(w == w0);
}

TEST_CASE("shifted_relax matches a dense shifted-Jacobi oracle") {
  Rng rng(53);
  auto bmat = identity_minus(testsup::random_chain(14, rng));
  auto t = SparseMatrix::identity(14);
  const double lambda = 0.3;
  auto x = rng.uniform_vec(14, -1.0, 1.0);
  auto got = x;
  shifted_relax(bmat, t, lambda, got, {0.7, 2});

  auto bd = to_dense(bmat);
  auto want = x;
  for (int s = 0; s < 2; ++s) {
    auto bx = testsup::dense_matvec(bd, want);
    for (int i = 0; i < 14; ++i) {
      const double sdiag = bd(i, i) - lambda;
      want[i] += 0.7 * (lambda * want[i] - bx[i]) / sdiag;
    }
  }
  CHECK(testsup::rel_err(got, want) <= 1e-13);
}

TEST_CASE("one Jacobi sweep never grows the homogeneous residual on lattice chains") {
  for (int n_side : {9, 17}) {
    auto bmat = identity_minus(gen_uniform_network(n_side).a);
    Rng rng(61);
    for (int trial = 0; trial < 10; ++trial) {
      auto x = rng.uniform_vec(bmat.rows(), 0.1, 1.0);
      const double r0 = testsup::nrm2(bmat.matvec(x));
      jacobi_sweep(bmat, x, std::vector<double>(bmat.rows(), 0.0), {0.7, 1});
      const double r1 = testsup::nrm2(bmat.matvec(x));
      CHECK(r1 <= r0 * (1 + 1e-12));
    }
  }
}
