#include "doctest.h"

#include <sstream>

#include "bamg/matrix_market.hpp"
#include "bamg/sparse.hpp"
#include "support.hpp"

using namespace bamg;
using testsup::to_dense;

TEST_CASE("from_triplets sums duplicates and drops zeros") {
  auto m = SparseMatrix::from_triplets(
      2, 2, {{0, 1, 2.0}, {0, 1, 3.0}, {1, 0, 1.0}, {1, 0, -1.0}, {1, 1, 0.0}});
  CHECK(m.nnz() == 1);
  CHECK(m.coeff(0, 1) == 5.0);
  CHECK(m.coeff(1, 0) == 0.0);
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), std::out_of_range);
}

TEST_CASE("matvec: identity fixed point and 2x2 swap") {
  auto i3 = SparseMatrix::identity(3);
  std::vector<double> x = {1.5, -2.0, 0.25};
  CHECK(i3.matvec(x) == x);

  auto swap = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
  std::vector<double> v = {3.0, 4.0};
  auto y = swap.matvec(v);
  CHECK(y[0] == 4.0);
  CHECK(y[1] == 3.0);
}

TEST_CASE("matvec / matmul / transpose match dense oracles on random matrices") {
  Rng rng(42);
  for (int trial = 0; trial < 12; ++trial) {
    const index_t n = 5 + static_cast<index_t>(rng.next_u64() % 45);
    const index_t m = 5 + static_cast<index_t>(rng.next_u64() % 45);
    std::vector<Triplet> ts;
    const int nnz = static_cast<int>(rng.next_u64() % (3u * n));
    for (int k = 0; k < nnz; ++k)
      ts.push_back({static_cast<index_t>(rng.next_u64() % n),
                    static_cast<index_t>(rng.next_u64() % m), rng.uniform(-2.0, 2.0)});
    auto a = SparseMatrix::from_triplets(n, m, ts);
    auto ad = to_dense(a);

    auto x = rng.uniform_vec(m, -1.0, 1.0);
    CHECK(testsup::rel_err(a.matvec(x), testsup::dense_matvec(ad, x)) <= 1e-13);

    auto at = a.transpose();
    auto atd = to_dense(at);
    for (index_t i = 0; i < n; ++i)
      for (index_t j = 0; j < m; ++j) CHECK(ad(i, j) == atd(j, i));
    CHECK(at.transpose().structurally_equal(a));

    std::vector<Triplet> ts2;
    const index_t p = 4 + static_cast<index_t>(rng.next_u64() % 20);
    for (int k = 0; k < 2 * m; ++k)
      ts2.push_back({static_cast<index_t>(rng.next_u64() % m),
                     static_cast<index_t>(rng.next_u64() % p), rng.uniform(-2.0, 2.0)});
    auto b = SparseMatrix::from_triplets(m, p, ts2);
    auto c = a.matmul(b, 0.0);
    auto cd = testsup::dense_matmul(ad, to_dense(b));
    auto got = to_dense(c);
    for (index_t i = 0; i < n; ++i)
      for (index_t j = 0; j < p; ++j)
        CHECK(got(i, j) == doctest::Approx(cd(i, j)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("matmul identity is neutral and drop tolerance removes cancellation dust") {
  auto a = SparseMatrix::from_triplets(3, 3, {{0, 0, 2.0}, {1, 2, -1.0}, {2, 1, 0.5}});
  auto i3 = SparseMatrix::identity(3);
  auto prod = i3.matmul(a);
  CHECK(prod.structurally_equal(a));
  CHECK(prod.values() == a.values());

  // (1 1; 1 1) * (1; -1) has an exactly cancelling row -> dropped even at tol 0.
  auto ones = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}});
  auto pm = SparseMatrix::from_triplets(2, 1, {{0, 0, 1.0}, {1, 0, -1.0}});
  CHECK(ones.matmul(pm, 0.0).nnz() == 0);
}

TEST_CASE("extract_blocks: degenerate partitions and a known 4x4 split") {
  auto m = SparseMatrix::from_triplets(
      4, 4, {{0, 0, 4.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 4.0}, {1, 2, 1.0},
             {2, 1, 1.0}, {2, 2, 4.0}, {2, 3, 1.0}, {3, 2, 1.0}, {3, 3, 4.0}});

  auto all_f = CfPartition::from_cset(4, {});
  auto bs0 = extract_blocks(m, all_f);
  CHECK(bs0.ff.structurally_equal(m));
  CHECK(bs0.cc.rows() == 0);

  auto all_c = CfPartition::from_cset(4, {0, 1, 2, 3});
  auto bs1 = extract_blocks(m, all_c);
  CHECK(bs1.cc.structurally_equal(m));
  CHECK(bs1.ff.rows() == 0);

  // C = {0, 2}: F = {1, 3}; hand-permuted blocks.
  auto part = CfPartition::from_cset(4, {0, 2});
  auto bs = extract_blocks(m, part);
  CHECK(bs.ff.coeff(0, 0) == 4.0);   // (1,1)
  CHECK(bs.ff.coeff(0, 1) == 0.0);   // (1,3)
  CHECK(bs.fc.coeff(0, 0) == 1.0);   // (1,0)
  CHECK(bs.fc.coeff(0, 1) == 1.0);   // (1,2)
  CHECK(bs.cf.coeff(0, 0) == 1.0);   // (0,1)
  CHECK(bs.cf.coeff(0, 1) == 0.0);   // (0,3)
  CHECK(bs.cf.coeff(1, 0) == 1.0);   // (2,1)
  CHECK(bs.cf.coeff(1, 1) == 1.0);   // (2,3)
  CHECK(bs.cc.coeff(0, 0) == 4.0);
  CHECK(bs.cc.coeff(0, 1) == 0.0);   // (0,2)
}

TEST_CASE("extract_blocks reassembles to the original matrix (property)") {
  Rng rng(321);
  for (int trial = 0; trial < 8; ++trial) {
    const index_t n = 6 + static_cast<index_t>(rng.next_u64() % 40);
    auto a = testsup::random_chain(n, rng);
    std::vector<index_t> cset;
    for (index_t i = 0; i < n; ++i)
      if (rng.uniform() < 0.4) cset.push_back(i);
    auto part = CfPartition::from_cset(n, cset);
    auto bs = extract_blocks(a, part);
    auto ad = to_dense(a);
    auto check_block = [&](const SparseMatrix& blk, const std::vector<index_t>& rmap,
                           const std::vector<index_t>& cmap) {
      auto bd = to_dense(blk);
      for (index_t i = 0; i < blk.rows(); ++i)
        for (index_t j = 0; j < blk.cols(); ++j) CHECK(bd(i, j) == ad(rmap[i], cmap[j]));
    };
    check_block(bs.ff, part.fset, part.fset);
    check_block(bs.fc, part.fset, part.cset);
    check_block(bs.cf, part.cset, part.fset);
    check_block(bs.cc, part.cset, part.cset);
  }
}

TEST_CASE("neighborhood: diagonal-only graph, path graph, and BFS oracle") {
  auto d = SparseMatrix::identity(5);
  std::vector<index_t> all = {0, 1, 2, 3, 4};
  CHECK(neighborhood(d, 2, 3, all).empty());

  // Undirected path 0-1-2-3-4.
  std::vector<Triplet> ts;
  for (index_t i = 0; i + 1 < 5; ++i) {
    ts.push_back({i, i + 1, 1.0});
    ts.push_back({i + 1, i, 1.0});
  }
  auto path = SparseMatrix::from_triplets(5, 5, ts);
  std::vector<index_t> targets = {0, 4};
  auto nb = neighborhood(path, 2, 2, targets);
  CHECK(nb == std::vector<index_t>{0, 4});
  CHECK(neighborhood(path, 2, 1, targets).empty());

  // Nesting: depth-z set is contained in depth-(z+1) set.
  Rng rng(5);
  auto g = testsup::random_chain(30, rng);
  std::vector<index_t> tg;
  for (index_t i = 0; i < 30; i += 3) tg.push_back(i);
  for (int z = 1; z <= 3; ++z) {
    auto a = neighborhood(g, 7, z, tg);
    auto b = neighborhood(g, 7, z + 1, tg);
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}

TEST_CASE("strong_components: identity, cycle, reducible block structure") {
  CHECK(SparseMatrix::identity(6).strong_components() == 6);

  std::vector<Triplet> cyc;
  for (index_t i = 0; i < 7; ++i) cyc.push_back({(i + 1) % 7, i, 1.0});
  CHECK(SparseMatrix::from_triplets(7, 7, cyc).strong_components() == 1);

  // Two 2-cycles {0,1} and {2,3} with a one-way bridge 1->2.
  auto red = SparseMatrix::from_triplets(
      4, 4, {{0, 1, 1.0}, {1, 0, 1.0}, {2, 3, 1.0}, {3, 2, 1.0}, {2, 1, 1.0}});
  CHECK(red.strong_components() == 2);
}

TEST_CASE("MatrixMarket: round trip, 1-based parsing, header rejection") {
  auto m = SparseMatrix::from_triplets(
      3, 3, {{0, 0, 1.0 / 3.0}, {0, 2, -1.25e-7}, {2, 1, 17.0}});
  std::ostringstream out;
  write_matrix_market(m, out, "unit test");
  std::istringstream in(out.str());
  auto r = read_matrix_market(in);
  CHECK(r.structurally_equal(m));
  CHECK(r.values() == m.values());  // 17 digits round-trips doubles exactly

  std::istringstream hand("%%MatrixMarket matrix coordinate real general\n% c\n2 2 2\n1 2 5.0\n2 1 -1\n");
  auto h = read_matrix_market(hand);
  CHECK(h.coeff(0, 1) == 5.0);
  CHECK(h.coeff(1, 0) == -1.0);

  std::istringstream bad1("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
  CHECK_THROWS_WITH_AS(read_matrix_market(bad1), doctest::Contains("array"), std::runtime_error);
  std::istringstream bad2("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 0 0\n");
  CHECK_THROWS_AS(read_matrix_market(bad2), std::runtime_error);
  std::istringstream bad3("%%MatrixMarket matrix coordinate real symmetric\n1 1 1\n1 1 2\n");
  CHECK_THROWS_AS(read_matrix_market(bad3), std::runtime_error);
  std::istringstream bad4("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 2.0\n");
  CHECK_THROWS_AS(read_matrix_market(bad4), std::runtime_error);
  std::istringstream bad5("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 2.0\n");
  CHECK_THROWS_AS(read_matrix_market(bad5), std::runtime_error);
}

TEST_CASE("identity_minus forms I - A") {
  auto a = SparseMatrix::from_triplets(2, 2, {{0, 0, 0.25}, {0, 1, 1.0}, {1, 0, 0.75}});
  auto b = identity_minus(a);
  CHECK(b.coeff(0, 0) == 0.75);
  CHECK(b.coeff(0, 1) == -1.0);
  CHECK(b.coeff(1, 0) == -0.75);
  CHECK(b.coeff(1, 1) == 1.0);
}
