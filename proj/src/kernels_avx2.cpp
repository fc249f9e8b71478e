#include "kernels_tables.hpp"

#if defined(BAMG_BUILD_AVX2)

#include <immintrin.h>

// AVX2+FMA variants. Loop structure is fixed (8-wide main loop, 4-wide
// epilogue, scalar tail) so results are deterministic run to run; they may
// differ from the scalar reference only by reassociation/FMA rounding, which
// the equivalence tests bound.
namespace bamg::kernels {
namespace {

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scal_avx2(double a, double* x, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void sub_avx2(const double* a, const double* b, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) y[i] = a[i] - b[i];
}

void diag_scaled_add_avx2(double a, const double* d, const double* r, double* x,
                          std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(av, _mm256_loadu_pd(d + i));
    __m256d xv = _mm256_fmadd_pd(t, _mm256_loadu_pd(r + i), _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(x + i, xv);
  }
  for (; i < n; ++i) x[i] += a * d[i] * r[i];
}

void csr_spmv_avx2(std::int32_t nrows, const std::int32_t* rowptr, const std::int32_t* cols,
                   const double* vals, const double* x, double* y) {
  for (std::int32_t i = 0; i < nrows; ++i) {
    const std::int32_t e = rowptr[i + 1];
    std::int32_t j = rowptr[i];
    __m256d acc = _mm256_setzero_pd();
    for (; j + 4 <= e; j += 4) {
      __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + j));
      __m256d xv = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + j), xv, acc);
    }
    double s = hsum(acc);
    for (; j < e; ++j) s += vals[j] * x[cols[j]];
    y[i] = s;
  }
}

}  // namespace

const Ops kAvx2Ops = {
    "avx2",       dot_avx2,          axpy_avx2, scal_avx2,
    sub_avx2, diag_scaled_add_avx2, csr_spmv_avx2,
};

}  // namespace bamg::kernels

#endif  // BAMG_BUILD_AVX2
