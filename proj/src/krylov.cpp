#include "bamg/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bamg/dense.hpp"
#include "bamg/kernels.hpp"

namespace bamg {
namespace {

double nrm2(const std::vector<double>& x) { return kernels::nrm2(x.data(), x.size()); }

void normalize_or_throw(std::vector<double>& x, const char* who) {
  const double n = nrm2(x);
  if (!(n > 0.0) || !std::isfinite(n)) {
    std::ostringstream msg;
    msg << who << ": cannot normalize a vector of norm " << n;
    throw std::runtime_error(msg.str());
  }
  kernels::scal(1.0 / n, x.data(), x.size());
}

void fix_sign(std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  if (s < 0.0) kernels::scal(-1.0, x.data(), x.size());
}

// ||B x / ||x|| ||_2 without modifying x.
double residual_of(const SparseMatrix& b, const std::vector<double>& x, const char* who) {
  std::vector<double> xhat = x;
  normalize_or_throw(xhat, who);
  std::vector<double> bx(xhat.size());
  b.matvec(xhat, bx);
  return nrm2(bx);
}

// Incremental least-squares state for full GMRES: Hessenberg columns are
// rotated into an upper-triangular R by accumulated Givens rotations, and the
// rotated right-hand side g carries the minimized residual in its tail.
class GivensLs {
 public:
  explicit GivensLs(double beta) : g_{beta} {}

  // Rotate a new Hessenberg column (entries 0..m+1 where m columns are done),
  // append its Givens rotation, and return the updated minimal residual.
  double push_column(std::vector<double> hcol) {
    const std::size_t m = r_.size();
    for (std::size_t i = 0; i < m; ++i) {
      const double t = cs_[i] * hcol[i] + sn_[i] * hcol[i + 1];
      hcol[i + 1] = -sn_[i] * hcol[i] + cs_[i] * hcol[i + 1];
      hcol[i] = t;
    }
    const double a = hcol[m], b = hcol[m + 1];
    const double rr = std::hypot(a, b);
    const double c = rr > 0.0 ? a / rr : 1.0;
    const double s = rr > 0.0 ? b / rr : 0.0;
    cs_.push_back(c);
    sn_.push_back(s);
    hcol[m] = rr;
    hcol.resize(m + 1);
    r_.push_back(std::move(hcol));
    g_.push_back(-s * g_[m]);
    g_[m] = c * g_[m];
    return std::abs(g_[m + 1]);
  }

  // Back-substitute R y = g for the current subspace dimension.
  std::vector<double> solve() const {
    const std::size_t m = r_.size();
    std::vector<double> y(m, 0.0);
    for (std::size_t i = m; i-- > 0;) {
      double s = g_[i];
      for (std::size_t j = i + 1; j < m; ++j) s -= r_[j][i] * y[j];
      if (r_[i][i] == 0.0)
        throw std::runtime_error("gmres: triangular factor is exactly singular");
      y[i] = s / r_[i][i];
    }
    return y;
  }

 private:
  std::vector<std::vector<double>> r_;  // column j holds R(0..j, j)
  std::vector<double> cs_, sn_, g_;
};

// Modified Gram-Schmidt step: orthogonalize w against basis, returning the
// projection coefficients in hcol[0..basis.size()-1] and ||w|| after
// orthogonalization in hcol[basis.size()].
std::vector<double> arnoldi_step(std::vector<double>& w,
                                 const std::vector<std::vector<double>>& basis) {
  std::vector<double> hcol(basis.size() + 1, 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double hij = kernels::dot(w.data(), basis[i].data(), w.size());
    hcol[i] = hij;
    kernels::axpy(-hij, basis[i].data(), w.data(), w.size());
  }
  hcol[basis.size()] = nrm2(w);
  return hcol;
}

bool happy_breakdown(const std::vector<double>& hcol) {
  const double beta = hcol.back();
  double scale = 0.0;
  for (double v : hcol) scale = std::max(scale, std::abs(v));
  return beta <= 1e-14 * std::max(scale, 1.0);
}

}  // namespace

std::vector<double> vcycle_apply(const Hierarchy& h, std::span<const double> r, std::size_t level,
                                 const SmootherParams& smoother) {
  if (level >= h.levels.size()) throw std::runtime_error("vcycle_apply: level out of range");
  const Level& lv = h.levels[level];
  if (static_cast<index_t>(r.size()) != lv.b.rows())
    throw std::runtime_error("vcycle_apply: residual size does not match the level operator");

  if (level + 1 == h.levels.size())
    return h.coarsest_pinv().matvec(std::vector<double>(r.begin(), r.end()));

  std::vector<double> z(r.size(), 0.0);
  jacobi_sweep(lv.b, z, r, smoother);

  std::vector<double> rho(r.size());
  lv.b.matvec(z, rho);
  kernels::sub(r.data(), rho.data(), rho.data(), rho.size());

  const std::vector<double> ec = vcycle_apply(h, lv.q.matvec(rho), level + 1, smoother);
  const std::vector<double> corr = lv.p.matvec(ec);
  kernels::axpy(1.0, corr.data(), z.data(), z.size());

  jacobi_sweep(lv.b, z, r, smoother);
  return z;
}

KrylovResult pgmres_solve(const Hierarchy& h, const SparseMatrix& b, std::span<const double> x0,
                          const KrylovParams& p) {
  const index_t n = b.rows();
  if (b.cols() != n) throw std::runtime_error("pgmres_solve: operator must be square");
  if (static_cast<index_t>(x0.size()) != n)
    throw std::runtime_error("pgmres_solve: start vector size does not match the operator");

  const auto apply_cb = [&](const std::vector<double>& y) {
    std::vector<double> by(y.size());
    b.matvec(y, by);
    return vcycle_apply(h, by, 0, p.smoother);
  };

  std::vector<double> xinit(x0.begin(), x0.end());
  const double x0norm = nrm2(xinit);
  if (!(x0norm > 0.0)) throw std::runtime_error("pgmres_solve: start vector is zero");

  KrylovResult out;
  std::vector<double> xhat = xinit;
  normalize_or_throw(xhat, "pgmres_solve");

  std::vector<double> r0 = apply_cb(xinit);
  kernels::scal(-1.0, r0.data(), r0.size());
  const double beta = nrm2(r0);
  double tres = residual_of(b, xhat, "pgmres_solve");
  out.history.push_back({0, beta, tres});

  if (tres <= p.tol || beta == 0.0) {
    out.converged = tres <= p.tol;
    fix_sign(xhat);
    out.x = std::move(xhat);
    return out;
  }

  std::vector<std::vector<double>> basis;
  kernels::scal(1.0 / beta, r0.data(), r0.size());
  basis.push_back(std::move(r0));
  GivensLs ls(beta);

  for (int m = 1; m <= p.max_iters; ++m) {
    std::vector<double> w = apply_cb(basis.back());
    std::vector<double> hcol = arnoldi_step(w, basis);
    const bool happy = happy_breakdown(hcol);
    const double bnext = hcol.back();
    const double prec = ls.push_column(hcol);

    const std::vector<double> y = ls.solve();
    std::vector<double> xm = xinit;
    for (std::size_t j = 0; j < y.size(); ++j)
      kernels::axpy(y[j], basis[j].data(), xm.data(), xm.size());
    const double xnorm = nrm2(xm);
    if (xnorm <= 1e-12 * x0norm)
      throw std::runtime_error(
          "pgmres_solve: iterate norm collapsed toward zero "
          "(the minimizer approached the trivial solution)");

    xhat = std::move(xm);
    kernels::scal(1.0 / xnorm, xhat.data(), xhat.size());
    std::vector<double> bx(xhat.size());
    b.matvec(xhat, bx);
    tres = nrm2(bx);

    out.history.push_back({m, prec, tres});
    out.iterations = m;
    if (tres <= p.tol) {
      out.converged = true;
      break;
    }
    if (happy) break;  // invariant subspace exhausted; nothing left to add

    kernels::scal(1.0 / bnext, w.data(), w.size());
    basis.push_back(std::move(w));
  }

  fix_sign(xhat);
  out.x = std::move(xhat);
  return out;
}

KrylovResult parnoldi_solve(const Hierarchy& h, const SparseMatrix& b, std::span<const double> y,
                            const KrylovParams& p) {
  const index_t n = b.rows();
  if (b.cols() != n) throw std::runtime_error("parnoldi_solve: operator must be square");
  if (static_cast<index_t>(y.size()) != n)
    throw std::runtime_error("parnoldi_solve: start vector size does not match the operator");

  const auto apply_cb = [&](const std::vector<double>& v) {
    std::vector<double> bv(v.size());
    b.matvec(v, bv);
    return vcycle_apply(h, bv, 0, p.smoother);
  };

  std::vector<double> v0(y.begin(), y.end());
  if (!(nrm2(v0) > 0.0)) throw std::runtime_error("parnoldi_solve: start vector is zero");
  normalize_or_throw(v0, "parnoldi_solve");

  KrylovResult out;
  const double tres0 = residual_of(b, v0, "parnoldi_solve");
  out.history.push_back({0, tres0, tres0});

  std::vector<std::vector<double>> basis{v0};
  std::vector<std::vector<double>> hcols;  // column j holds H(0..j+1, j)
  std::vector<double> candidate = v0;

  for (int k = 1; k <= p.max_iters; ++k) {
    std::vector<double> w = apply_cb(basis.back());
    std::vector<double> hcol = arnoldi_step(w, basis);
    const bool happy = happy_breakdown(hcol);
    const double bnext = hcol.back();
    hcols.push_back(hcol);

    // Square projection H_k = V_k^t (C B) V_k: the subdiagonal entry of the
    // last column is excluded.
    DenseMatrix hk(k, k);
    for (int j = 0; j < k; ++j)
      for (int i = 0; i <= std::min(j + 1, k - 1); ++i) hk.at(i, j) = hcols[j][i];

    const std::vector<EigPair> pairs = eig(hk);
    std::size_t best = 0;
    for (std::size_t e = 1; e < pairs.size(); ++e)
      if (std::abs(pairs[e].value) < std::abs(pairs[best].value)) best = e;
    const std::vector<std::complex<double>>& eta = pairs[best].vector;

    // Ritz vector V_k eta; for a complex eta keep the larger of the real and
    // imaginary parts (the eigenvalue nearest zero is real in practice).
    std::vector<double> re(n, 0.0), im(n, 0.0);
    for (int j = 0; j < k; ++j) {
      kernels::axpy(eta[j].real(), basis[j].data(), re.data(), re.size());
      kernels::axpy(eta[j].imag(), basis[j].data(), im.data(), im.size());
    }
    candidate = nrm2(re) >= nrm2(im) ? std::move(re) : std::move(im);
    normalize_or_throw(candidate, "parnoldi_solve");

    const double prec = bnext * std::abs(eta[static_cast<std::size_t>(k) - 1]);
    std::vector<double> bx(candidate.size());
    b.matvec(candidate, bx);
    const double tres = nrm2(bx);

    out.history.push_back({k, prec, tres});
    out.iterations = k;

    const bool stop = tres <= p.tol || happy || k == p.max_iters;
    if (stop) {
      out.converged = tres <= p.tol;
      out.ritz_values.reserve(pairs.size());
      for (const EigPair& e : pairs) out.ritz_values.push_back(e.value);
      std::sort(out.ritz_values.begin(), out.ritz_values.end(),
                [](const std::complex<double>& a, const std::complex<double>& b2) {
                  return std::abs(a) < std::abs(b2);
                });
      break;
    }

    kernels::scal(1.0 / bnext, w.data(), w.size());
    basis.push_back(std::move(w));
  }

  fix_sign(candidate);
  out.x = std::move(candidate);
  return out;
}

KrylovResult gmres_solve(const SparseMatrix& b, std::span<const double> rhs,
                         std::span<const double> x0, const KrylovParams& p) {
  const index_t n = b.rows();
  if (b.cols() != n) throw std::runtime_error("gmres_solve: operator must be square");
  if (static_cast<index_t>(rhs.size()) != n || static_cast<index_t>(x0.size()) != n)
    throw std::runtime_error("gmres_solve: vector sizes do not match the operator");

  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> r0(n);
  b.matvec(x, r0);
  std::vector<double> rhsv(rhs.begin(), rhs.end());
  kernels::sub(rhsv.data(), r0.data(), r0.data(), r0.size());

  const double rhsnorm = nrm2(rhsv);
  const double stop = p.tol * (rhsnorm > 0.0 ? rhsnorm : 1.0);

  KrylovResult out;
  const double beta = nrm2(r0);
  out.history.push_back({0, beta, beta});
  if (beta <= stop) {
    out.converged = true;
    out.x = std::move(x);
    return out;
  }

  std::vector<std::vector<double>> basis;
  kernels::scal(1.0 / beta, r0.data(), r0.size());
  basis.push_back(std::move(r0));
  GivensLs ls(beta);

  for (int m = 1; m <= p.max_iters; ++m) {
    std::vector<double> w(n);
    b.matvec(basis.back(), w);
    std::vector<double> hcol = arnoldi_step(w, basis);
    const bool happy = happy_breakdown(hcol);
    const double bnext = hcol.back();
    const double prec = ls.push_column(hcol);

    const std::vector<double> y = ls.solve();
    std::vector<double> xm(x0.begin(), x0.end());
    for (std::size_t j = 0; j < y.size(); ++j)
      kernels::axpy(y[j], basis[j].data(), xm.data(), xm.size());

    std::vector<double> resid(n);
    b.matvec(xm, resid);
    kernels::sub(rhsv.data(), resid.data(), resid.data(), resid.size());
    const double tres = nrm2(resid);

    out.history.push_back({m, prec, tres});
    out.iterations = m;
    x = std::move(xm);
    if (tres <= stop) {
      out.converged = true;
      break;
    }
    if (happy) break;

    kernels::scal(1.0 / bnext, w.data(), w.size());
    basis.push_back(std::move(w));
  }

  out.x = std::move(x);
  return out;
}

KrylovResult power_iterate(const SparseMatrix& a, std::span<const double> x0, int max_iters,
                           double tol) {
  if (a.cols() != a.rows()) throw std::runtime_error("power_iterate: operator must be square");
  std::vector<double> x(x0.begin(), x0.end());
  normalize_or_throw(x, "power_iterate");

  const auto resid = [&](const std::vector<double>& v) {
    std::vector<double> av(v.size());
    a.matvec(v, av);
    kernels::sub(v.data(), av.data(), av.data(), av.size());  // (I - A) v
    return nrm2(av);
  };

  KrylovResult out;
  double r = resid(x);
  out.history.push_back({0, r, r});
  for (int k = 1; k <= max_iters && r > tol; ++k) {
    std::vector<double> ax(x.size());
    a.matvec(x, ax);
    x = std::move(ax);
    normalize_or_throw(x, "power_iterate");
    r = resid(x);
    out.history.push_back({k, r, r});
    out.iterations = k;
  }
  out.converged = r <= tol;
  fix_sign(x);
  out.x = std::move(x);
  return out;
}

KrylovResult tau_richardson(const SparseMatrix& b, std::span<const double> x0, double tau,
                            int max_iters, double tol) {
  if (b.cols() != b.rows()) throw std::runtime_error("tau_richardson: operator must be square");
  std::vector<double> x(x0.begin(), x0.end());
  normalize_or_throw(x, "tau_richardson");

  const auto resid = [&](const std::vector<double>& v) {
    std::vector<double> bv(v.size());
    b.matvec(v, bv);
    return nrm2(bv);
  };

  KrylovResult out;
  double r = resid(x);
  out.history.push_back({0, r, r});
  for (int k = 1; k <= max_iters && r > tol; ++k) {
    std::vector<double> bx(x.size());
    b.matvec(x, bx);
    kernels::axpy(-tau, bx.data(), x.data(), x.size());
    normalize_or_throw(x, "tau_richardson");
    r = resid(x);
    out.history.push_back({k, r, r});
    out.iterations = k;
  }
  out.converged = r <= tol;
  fix_sign(x);
  out.x = std::move(x);
  return out;
}

}  // namespace bamg
