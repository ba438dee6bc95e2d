#pragma once

#include <Eigen/Sparse>

namespace porofss {

using SparseMat = Eigen::SparseMatrix<double>;

struct PcgResult {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

/**
 * Jacobi-preconditioned conjugate gradients for symmetric positive definite
 * systems. Deterministic: zero initial guess, fixed update order, no
 * parallel reductions. Convergence test: |b - A x|_2 <= rel_tol * |b|_2;
 * a zero right-hand side returns x = 0 immediately.
 *
 * Throws SolverError if a diagonal entry is not positive or if the
 * preconditioned curvature p' A p becomes non-positive (matrix not SPD).
 */
PcgResult pcg_jacobi(const SparseMat& A, const Eigen::VectorXd& b,
                     Eigen::VectorXd& x, double rel_tol, int max_iter);

} // namespace porofss
