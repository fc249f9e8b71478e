#pragma once

#include <span>
#include <vector>

#include "bamg/sparse.hpp"

namespace bamg {

struct SmootherParams {
  double omega = 0.7;
  int sweeps = 2;
};

// Damped (omega-)Jacobi on M x = b: x += omega * D^{-1} (b - M x), repeated
// params.sweeps times. Throws std::runtime_error if a diagonal entry's
// magnitude is <= 1e-14 (naming the row).
void jacobi_sweep(const SparseMatrix& m, std::span<double> x, std::span<const double> b,
                  const SmootherParams& params);

// F-point relaxation u_f <- (I - omega D_ff^{-1} B_ff) u_f used by the
// compatible-relaxation coarsener. Extracting B_ff is the expensive part, so
// the extraction is reusable; sweeps act on the F-subvector in place.
class FRelax {
 public:
  FRelax(const SparseMatrix& m, const CfPartition& part, double omega);
  void sweep(std::vector<double>& uf) const;  // one sweep on the F-subvector
  const SparseMatrix& bff() const { return bff_; }

 private:
  SparseMatrix bff_;
  std::vector<double> dinv_;
  double omega_;
  mutable std::vector<double> work_;
};

// Whole-vector convenience form: relaxes the F entries of u (params.sweeps
// times), leaves C entries untouched.
void f_relax_sweep(const SparseMatrix& m, const CfPartition& part, std::span<double> u,
                   const SmootherParams& params);

// Jacobi on the shifted pencil (B - lambda T) x = 0. Rows whose shifted
// diagonal magnitude is <= 1e-12 are skipped; returns how many rows were
// skipped per sweep.
int shifted_relax(const SparseMatrix& b, const SparseMatrix& t, double lambda,
                  std::span<double> x, const SmootherParams& params);

}  // namespace bamg
