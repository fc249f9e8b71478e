#pragma once

#include <complex>
#include <span>
#include <vector>

#include "bamg/hierarchy.hpp"
#include "bamg/smoothing.hpp"
#include "bamg/sparse.hpp"

namespace bamg {

// Iterative-phase controls. The methods are full (unrestarted) Krylov
// iterations; max_iters caps the subspace dimension.
struct KrylovParams {
  double tol = 1e-8;  // stop once ||B x̂||_2 of the unit-norm iterate drops below
  int max_iters = 300;
  SmootherParams smoother;  // V-cycle pre/post smoothing (2 damped-Jacobi sweeps)
};

// One history row: the residual quantity that drives the method internally
// (GMRES minimized residual ||C B x_m||, Arnoldi Ritz-pair residual, or the
// baseline's own ||B x̂||), and the true residual ||B x̂||_2 of the normalized
// candidate at that step.
struct IterRecord {
  int iteration = 0;
  double precond_resid = 0.0;
  double true_resid = 0.0;
};

struct KrylovResult {
  std::vector<double> x;  // pgmres/parnoldi/baselines: unit 2-norm, positive sum
  bool converged = false;
  int iterations = 0;  // steps run; the step that first meets tol is counted
  std::vector<IterRecord> history;  // history.front() records the start vector
  std::vector<std::complex<double>> ritz_values;  // parnoldi: final H_k spectrum
};

// One multigrid V-cycle z = C r starting at `level`: pre-smooth B_l z = r
// from z = 0, restrict the residual with Q_l, recurse, interpolate the
// coarse correction with P_l, post-smooth. The coarsest level applies the
// cached Moore-Penrose pseudoinverse (the minimum-norm least-squares solve),
// so the hierarchy must be finalized. C is a fixed linear operator: the same
// r always produces the identical z, which is what makes the standard
// (non-flexible) GMRES below valid.
std::vector<double> vcycle_apply(const Hierarchy& h, std::span<const double> r,
                                 std::size_t level = 0, const SmootherParams& smoother = {});

// Full GMRES on the left-preconditioned homogeneous system C B x = 0 from a
// nonzero initial guess x0 (normally the setup phase's stationary
// approximation). The Krylov space grows from r0 = -C B x0 and the residual
// is minimized over x0 + span{r0, ...}: shrinking ||C B x|| pulls the
// iterate toward the kernel of B while the affine offset keeps it away from
// the trivial solution. Each step also evaluates the true residual
// ||B x̂||_2 of the normalized iterate and stops once it meets p.tol.
// Throws std::runtime_error if x0 is zero or the iterate norm collapses
// toward zero (the minimizer approached the trivial solution).
KrylovResult pgmres_solve(const Hierarchy& h, const SparseMatrix& b, std::span<const double> x0,
                          const KrylovParams& p);

// Arnoldi on C B from start vector y: builds the projection
// H_k = V_k^t (C B) V_k, takes the eigenvalue of H_k closest to zero with
// eigenvector eta, and evaluates the candidate x = V_k eta (normalized).
// Stops once ||B x̂||_2 meets p.tol; a happy breakdown (exact invariant
// subspace) makes the current candidate final. ritz_values of the result
// hold the spectrum of the last H_k, sorted by distance from zero.
KrylovResult parnoldi_solve(const Hierarchy& h, const SparseMatrix& b, std::span<const double> y,
                            const KrylovParams& p);

// Plain full GMRES on the linear system B x = rhs without preconditioning
// (the solvability baseline: for rhs in range(B) on an irreducible chain the
// minimized residual reaches zero within n steps). Stops when the residual
// drops below p.tol * ||rhs|| (absolute p.tol if rhs = 0). The returned x is
// the minimizer itself, not normalized; history rows carry the recurrence
// residual and the recomputed ||rhs - B x_m||.
KrylovResult gmres_solve(const SparseMatrix& b, std::span<const double> rhs,
                         std::span<const double> x0, const KrylovParams& p);

// Baseline iterations for comparison plots and slow independent oracles.
// Histories record ||B x̂||_2 in both residual columns.
//   power_iterate:  x <- A x, renormalized each step
//   tau_richardson: x <- x - tau * B x, renormalized each step
KrylovResult power_iterate(const SparseMatrix& a, std::span<const double> x0, int max_iters,
                           double tol = 1e-8);
KrylovResult tau_richardson(const SparseMatrix& b, std::span<const double> x0, double tau,
                            int max_iters, double tol = 1e-8);

}  // namespace bamg
