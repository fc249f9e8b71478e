#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops shared by the sparse, smoothing and Krylov code.
//
// Every kernel has a scalar reference implementation (compiled without FMA
// contraction) and may have SIMD variants. The active variant is picked at
// runtime from CPU capabilities and can be forced, e.g. to compare variants
// against each other or to pin a run to the reference path.
namespace bamg::kernels {

enum class Isa { scalar, avx2 };

// Entry points for one ISA. All kernels are pure loops over contiguous
// arrays; `csr_spmv` requires y not to alias x.
struct Ops {
  const char* name;
  double (*dot)(const double* x, const double* y, std::size_t n);
  void (*axpy)(double a, const double* x, double* y, std::size_t n);        // y += a*x
  void (*scal)(double a, double* x, std::size_t n);                         // x *= a
  void (*sub)(const double* a, const double* b, double* y, std::size_t n);  // y = a - b
  // x += a * (d .* r): the damped-Jacobi correction with d = 1/diag
  void (*diag_scaled_add)(double a, const double* d, const double* r, double* x, std::size_t n);
  // y = M x for CSR data (rowptr has nrows+1 entries)
  void (*csr_spmv)(std::int32_t nrows, const std::int32_t* rowptr, const std::int32_t* cols,
                   const double* vals, const double* x, double* y);
};

const char* isa_name(Isa isa);
bool supported(Isa isa);  // compiled in and usable on this CPU
const Ops& ops(Isa isa);  // throws std::invalid_argument if !supported(isa)
Isa active();
bool set_active(Isa isa);  // false (and no change) if unsupported

// Wrappers routing through the active variant.
double dot(const double* x, const double* y, std::size_t n);
double nrm2(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scal(double a, double* x, std::size_t n);
void sub(const double* a, const double* b, double* y, std::size_t n);
void diag_scaled_add(double a, const double* d, const double* r, double* x, std::size_t n);
void csr_spmv(std::int32_t nrows, const std::int32_t* rowptr, const std::int32_t* cols,
              const double* vals, const double* x, double* y);

}  // namespace bamg::kernels
