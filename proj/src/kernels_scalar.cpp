#include "kernels_tables.hpp"

// Reference kernels. This translation unit is built with -ffp-contract=off so
// the compiler cannot fuse multiply-adds; results are the plain IEEE double
// evaluation of the written expressions, which the SIMD variants are tested
// against.
namespace bamg::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void sub_scalar(const double* a, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] - b[i];
}

void diag_scaled_add_scalar(double a, const double* d, const double* r, double* x,
                            std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] += a * d[i] * r[i];
}

void csr_spmv_scalar(std::int32_t nrows, const std::int32_t* rowptr, const std::int32_t* cols,
                     const double* vals, const double* x, double* y) {
  for (std::int32_t i = 0; i < nrows; ++i) {
    double s = 0.0;
    for (std::int32_t j = rowptr[i]; j < rowptr[i + 1]; ++j) s += vals[j] * x[cols[j]];
    y[i] = s;
  }
}

}  // namespace

const Ops kScalarOps = {
    "scalar",       dot_scalar,          axpy_scalar, scal_scalar,
    sub_scalar, diag_scaled_add_scalar, csr_spmv_scalar,
};

}  // namespace bamg::kernels
