#include "kernels_tables.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bamg::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(BAMG_BUILD_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect_best() { return cpu_has_avx2() ? Isa::avx2 : Isa::scalar; }

Isa g_active = detect_best();
const Ops* g_ops = &ops(g_active);

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "?";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return cpu_has_avx2();
  }
  return false;
}

const Ops& ops(Isa isa) {
  if (isa == Isa::scalar) return kScalarOps;
#if defined(BAMG_BUILD_AVX2)
  if (isa == Isa::avx2 && cpu_has_avx2()) return kAvx2Ops;
#endif
  throw std::invalid_argument(std::string("kernel variant not available: ") + isa_name(isa));
}

Isa active() { return g_active; }

bool set_active(Isa isa) {
  if (!supported(isa)) return false;
  g_active = isa;
  g_ops = &ops(isa);
  return true;
}

double dot(const double* x, const double* y, std::size_t n) { return g_ops->dot(x, y, n); }
double nrm2(const double* x, std::size_t n) { return std::sqrt(g_ops->dot(x, x, n)); }
void axpy(double a, const double* x, double* y, std::size_t n) { g_ops->axpy(a, x, y, n); }
void scal(double a, double* x, std::size_t n) { g_ops->scal(a, x, n); }
void sub(const double* a, const double* b, double* y, std::size_t n) { g_ops->sub(a, b, y, n); }
void diag_scaled_add(double a, const double* d, const double* r, double* x, std::size_t n) {
  g_ops->diag_scaled_add(a, d, r, x, n);
}
void csr_spmv(std::int32_t nrows, const std::int32_t* rowptr, const std::int32_t* cols,
              const double* vals, const double* x, double* y) {
  g_ops->csr_spmv(nrows, rowptr, cols, vals, x, y);
}

}  // namespace bamg::kernels
