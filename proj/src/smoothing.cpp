#include "bamg/smoothing.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bamg/kernels.hpp"

namespace bamg {
namespace {

std::vector<double> checked_dinv(const SparseMatrix& m, double floor_mag) {
  auto d = m.diagonal();
  for (index_t i = 0; i < static_cast<index_t>(d.size()); ++i)
    if (std::abs(d[i]) <= floor_mag)
      throw std::runtime_error("Jacobi smoother: zero diagonal at row " + std::to_string(i) +
                               " (|d| = " + std::to_string(std::abs(d[i])) + ")");
  for (double& v : d) v = 1.0 / v;
  return d;
}

}  // namespace

void jacobi_sweep(const SparseMatrix& m, std::span<double> x, std::span<const double> b,
                  const SmootherParams& params) {
  const std::size_t n = x.size();
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != n || b.size() != n)
    throw std::invalid_argument("jacobi_sweep dimension mismatch");
  auto dinv = checked_dinv(m, 1e-14);
  std::vector<double> r(n);
  for (int s = 0; s < params.sweeps; ++s) {
    m.matvec(x, r);                                      // r = M x
    kernels::sub(b.data(), r.data(), r.data(), n);       // r = b - M x
    kernels::diag_scaled_add(params.omega, dinv.data(), r.data(), x.data(), n);
  }
}

FRelax::FRelax(const SparseMatrix& m, const CfPartition& part, double omega) : omega_(omega) {
  bff_ = extract_blocks(m, part).ff;
  if (bff_.rows() > 0) dinv_ = checked_dinv(bff_, 1e-14);
  work_.resize(bff_.rows());
}

void FRelax::sweep(std::vector<double>& uf) const {
  const std::size_t nf = uf.size();
  if (static_cast<index_t>(nf) != bff_.rows())
    throw std::invalid_argument("FRelax: subvector size mismatch");
  if (nf == 0) return;
  bff_.matvec(uf, work_);
  // u_f -= omega * D^{-1} (B_ff u_f)
  kernels::scal(-1.0, work_.data(), nf);
  kernels::diag_scaled_add(omega_, dinv_.data(), work_.data(), uf.data(), nf);
}

void f_relax_sweep(const SparseMatrix& m, const CfPartition& part, std::span<double> u,
                   const SmootherParams& params) {
  if (static_cast<index_t>(u.size()) != part.n)
    throw std::invalid_argument("f_relax_sweep dimension mismatch");
  FRelax fr(m, part, params.omega);
  std::vector<double> uf(part.num_fine());
  for (std::size_t k = 0; k < uf.size(); ++k) uf[k] = u[part.fset[k]];
  for (int s = 0; s < params.sweeps; ++s) fr.sweep(uf);
  for (std::size_t k = 0; k < uf.size(); ++k) u[part.fset[k]] = uf[k];
}

int shifted_relax(const SparseMatrix& b, const SparseMatrix& t, double lambda,
                  std::span<double> x, const SmootherParams& params) {
  const std::size_t n = x.size();
  if (b.rows() != b.cols() || t.rows() != t.cols() || b.rows() != t.rows() ||
      static_cast<std::size_t>(b.rows()) != n)
    throw std::invalid_argument("shifted_relax dimension mismatch");
  auto db = b.diagonal();
  auto dt = t.diagonal();
  int skipped = 0;
  std::vector<double> sinv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = db[i] - lambda * dt[i];
    if (std::abs(s) <= 1e-12) {
      sinv[i] = 0.0;  // leave x_i untouched
      ++skipped;
    } else {
      sinv[i] = 1.0 / s;
    }
  }
  std::vector<double> rb(n), rt(n);
  for (int s = 0; s < params.sweeps; ++s) {
    b.matvec(x, rb);
    t.matvec(x, rt);
    // r = lambda*T x - B x  (negated pencil residual), then Jacobi update.
    kernels::scal(lambda, rt.data(), n);
    kernels::sub(rt.data(), rb.data(), rt.data(), n);
    kernels::diag_scaled_add(params.omega, sinv.data(), rt.data(), x.data(), n);
  }
  return skipped;
}

}  // namespace bamg
