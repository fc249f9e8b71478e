#include "bamg/chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bamg/matrix_market.hpp"
#include "bamg/rng.hpp"
#include "delaunay.hpp"

namespace bamg {

const char* chain_kind_name(ChainKind k) {
  switch (k) {
    case ChainKind::uniform_grid: return "uniform";
    case ChainKind::tandem_queue: return "tandem";
    case ChainKind::planar_graph: return "planar";
    case ChainKind::external: return "external";
  }
  return "?";
}

ChainProblem gen_uniform_network(int n_side) {
  if (n_side < 2) throw std::invalid_argument("uniform network needs N >= 2");
  const index_t n = static_cast<index_t>(n_side) * n_side;
  auto idx = [n_side](int r, int c) { return static_cast<index_t>(r) * n_side + c; };
  std::vector<Triplet> ts;
  ts.reserve(static_cast<std::size_t>(4) * n);
  for (int r = 0; r < n_side; ++r)
    for (int c = 0; c < n_side; ++c) {
      const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
      int deg = 0;
      for (int d = 0; d < 4; ++d) {
        int rr = r + dr[d], cc = c + dc[d];
        if (rr >= 0 && rr < n_side && cc >= 0 && cc < n_side) ++deg;
      }
      const double w = 1.0 / deg;
      for (int d = 0; d < 4; ++d) {
        int rr = r + dr[d], cc = c + dc[d];
        if (rr >= 0 && rr < n_side && cc >= 0 && cc < n_side)
          ts.push_back({idx(rr, cc), idx(r, c), w});
      }
    }
  ChainProblem p;
  p.a = SparseMatrix::from_triplets(n, n, std::move(ts));
  p.n = n;
  p.kind = ChainKind::uniform_grid;
  p.grid_dim = n_side;
  return p;
}

ChainProblem gen_tandem_queue(int n_side, const TandemRates& rates) {
  if (n_side < 2) throw std::invalid_argument("tandem queue needs N >= 2");
  if (rates.arrival <= 0 || rates.stage1 <= 0 || rates.stage2 <= 0)
    throw std::invalid_argument("tandem rates must be positive");
  const index_t n = static_cast<index_t>(n_side) * n_side;
  auto idx = [n_side](int i, int j) { return static_cast<index_t>(i) * n_side + j; };
  std::vector<Triplet> ts;
  for (int i = 0; i < n_side; ++i)
    for (int j = 0; j < n_side; ++j) {
      struct Move {
        int ti, tj;
        double w;
      };
      const Move moves[] = {
          {i + 1, j, rates.arrival},       // arrival to queue 1
          {i - 1, j + 1, rates.stage1},    // stage-1 completion feeds queue 2
          {i, j - 1, rates.stage2},        // stage-2 completion departs
      };
      double wsum = 0.0;
      for (const auto& m : moves)
        if (m.ti >= 0 && m.ti < n_side && m.tj >= 0 && m.tj < n_side) wsum += m.w;
      if (wsum == 0.0)
        throw std::logic_error("tandem state with no feasible transition");  // impossible for N>=2
      for (const auto& m : moves)
        if (m.ti >= 0 && m.ti < n_side && m.tj >= 0 && m.tj < n_side)
          ts.push_back({idx(m.ti, m.tj), idx(i, j), m.w / wsum});
    }
  ChainProblem p;
  p.a = SparseMatrix::from_triplets(n, n, std::move(ts));
  p.n = n;
  p.kind = ChainKind::tandem_queue;
  p.grid_dim = n_side;
  return p;
}

ChainProblem gen_planar_from_points(std::vector<std::array<double, 2>> pts) {
  const index_t n = static_cast<index_t>(pts.size());
  auto edges = detail::delaunay_edges(pts);
  std::vector<int> deg(n, 0);
  for (const auto& e : edges) {
    ++deg[e.first];
    ++deg[e.second];
  }
  for (index_t i = 0; i < n; ++i)
    if (deg[i] == 0) throw detail::DelaunayDegenerate("isolated point in triangulation");
  std::vector<Triplet> ts;
  ts.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    ts.push_back({static_cast<index_t>(e.second), static_cast<index_t>(e.first),
                  1.0 / deg[e.first]});
    ts.push_back({static_cast<index_t>(e.first), static_cast<index_t>(e.second),
                  1.0 / deg[e.second]});
  }
  ChainProblem p;
  p.a = SparseMatrix::from_triplets(n, n, std::move(ts));
  p.n = n;
  p.kind = ChainKind::planar_graph;
  p.points = std::move(pts);
  return p;
}

ChainProblem gen_planar_graph(int num_points, std::uint64_t seed) {
  if (num_points < 4) throw std::invalid_argument("planar graph needs at least 4 points");
  Rng rng(seed);
  std::vector<std::array<double, 2>> pts(num_points);
  for (auto& pt : pts) {
    pt[0] = rng.uniform();
    pt[1] = rng.uniform();
  }
  for (int attempt = 0;; ++attempt) {
    try {
      ChainProblem p = gen_planar_from_points(pts);
      p.seed = seed;
      return p;
    } catch (const detail::DelaunayDegenerate&) {
      if (attempt >= 3) throw;
      // Degenerate draw (collinear/cocircular): jiggle and retry.
      for (auto& pt : pts) {
        pt[0] = std::clamp(pt[0] + 1e-10 * (rng.uniform() - 0.5), 0.0, 1.0);
        pt[1] = std::clamp(pt[1] + 1e-10 * (rng.uniform() - 0.5), 0.0, 1.0);
      }
    }
  }
}

ChainProblem load_chain(const std::string& mtx_path) {
  ChainProblem p;
  p.a = read_matrix_market(mtx_path);
  if (p.a.rows() != p.a.cols())
    throw std::runtime_error("chain matrix must be square, got " + std::to_string(p.a.rows()) +
                             "x" + std::to_string(p.a.cols()));
  p.n = p.a.rows();
  p.kind = ChainKind::external;
  return p;
}

SparseMatrix strip_self_transitions(const SparseMatrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("strip_self_transitions needs a square matrix");
  auto d = a.diagonal();
  for (index_t j = 0; j < a.cols(); ++j)
    if (d[j] >= 1.0 - 1e-14)
      throw std::runtime_error("state " + std::to_string(j) +
                               " is absorbing (a_jj = " + std::to_string(d[j]) +
                               "); cannot strip self transitions");
  std::vector<Triplet> ts;
  ts.reserve(a.nnz());
  for (index_t i = 0; i < a.rows(); ++i) {
    auto cs = a.row_cols(i);
    auto vs = a.row_vals(i);
    for (std::size_t k = 0; k < cs.size(); ++k) {
      if (cs[k] == i) continue;
      ts.push_back({i, cs[k], vs[k] / (1.0 - d[cs[k]])});
    }
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(ts));
}

bool ValidationReport::ok() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& c : checks)
    os << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  return os.str();
}

ValidationReport validate(const ChainProblem& p) {
  ValidationReport rep;
  const SparseMatrix& a = p.a;

  {
    ValidationCheck c{"square-nonempty", a.rows() == a.cols() && a.rows() > 0, ""};
    c.detail = std::to_string(a.rows()) + "x" + std::to_string(a.cols());
    rep.checks.push_back(c);
    if (!c.pass) return rep;  // nothing else is well-defined
  }
  {
    // Column sums == 1 within roundoff accumulated over a column.
    auto s = a.column_sums();
    double worst = 0.0;
    index_t worst_j = 0;
    for (index_t j = 0; j < a.cols(); ++j) {
      double d = std::abs(s[j] - 1.0);
      if (d > worst) {
        worst = d;
        worst_j = j;
      }
    }
    const double tol = 1e-14 * std::max<double>(16.0, a.rows());
    ValidationCheck c{"column-stochastic", worst <= tol, ""};
    std::ostringstream os;
    os << "max |colsum-1| = " << worst << " at column " << worst_j << " (tol " << tol << ")";
    c.detail = os.str();
    rep.checks.push_back(c);
  }
  {
    double lo = 0.0, hi = 1.0;
    index_t bad_i = -1, bad_j = -1;
    for (index_t i = 0; i < a.rows() && bad_i < 0; ++i) {
      auto cs = a.row_cols(i);
      auto vs = a.row_vals(i);
      for (std::size_t k = 0; k < cs.size(); ++k)
        if (vs[k] < lo || vs[k] > hi + 1e-15) {
          bad_i = i;
          bad_j = cs[k];
          break;
        }
    }
    ValidationCheck c{"entries-in-unit-interval", bad_i < 0, ""};
    c.detail = bad_i < 0 ? "all entries in [0,1]"
                         : "entry (" + std::to_string(bad_i) + ", " + std::to_string(bad_j) +
                               ") = " + std::to_string(a.coeff(bad_i, bad_j));
    rep.checks.push_back(c);
  }
  {
    auto d = a.diagonal();
    index_t bad = -1;
    for (index_t i = 0; i < a.rows(); ++i)
      if (d[i] != 0.0) {
        bad = i;
        break;
      }
    ValidationCheck c{"zero-diagonal", bad < 0, ""};
    c.detail = bad < 0 ? "no stored self transitions"
                       : "a(" + std::to_string(bad) + "," + std::to_string(bad) + ") = " +
                             std::to_string(d[bad]) + " (strip_self_transitions applies)";
    rep.checks.push_back(c);
  }
  {
    index_t comps = a.strong_components();
    ValidationCheck c{"irreducible", comps == 1,
                      std::to_string(comps) + " strongly connected component(s)"};
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace bamg
