#include <porofss/linsolve.hpp>

#include <porofss/error.hpp>

#include <cmath>
#include <string>

namespace porofss {

PcgResult pcg_jacobi(const SparseMat& A, const Eigen::VectorXd& b,
                     Eigen::VectorXd& x, double rel_tol, int max_iter) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || b.size() != n) {
    throw SolverError("pcg: dimension mismatch");
  }

  Eigen::VectorXd dinv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = A.coeff(i, i);
    if (!(d > 0.0)) {
      throw SolverError("pcg: non-positive diagonal entry at row " +
                        std::to_string(i) + " (matrix not SPD)");
    }
    dinv(i) = 1.0 / d;
  }

  x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  PcgResult res;
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }

  Eigen::VectorXd r = b;
  Eigen::VectorXd z = dinv.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);

  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd Ap = A * p;
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) {
      throw SolverError("pcg: curvature p'Ap = " + std::to_string(pAp) +
                        " <= 0 at iteration " + std::to_string(it) +
                        " (matrix not SPD)");
    }
    const double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;

    const double rnorm = r.norm();
    res.iterations = it;
    res.rel_residual = rnorm / bnorm;
    if (rnorm <= rel_tol * bnorm) {
      res.converged = true;
      return res;
    }

    z = dinv.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return res;
}

} // namespace porofss
