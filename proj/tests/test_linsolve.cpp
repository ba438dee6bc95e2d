#include <doctest.h>

#include <porofss/error.hpp>
#include <porofss/linsolve.hpp>

#include <Eigen/Cholesky>

#include <random>
#include <vector>

using namespace porofss;

TEST_SUITE_BEGIN("linsolve");

namespace {

SparseMat sparse_from_dense(const Eigen::MatrixXd& d) {
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < d.rows(); ++i) {
    for (int j = 0; j < d.cols(); ++j) {
      if (d(i, j) != 0.0) t.emplace_back(i, j, d(i, j));
    }
  }
  SparseMat a(d.rows(), d.cols());
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

} // namespace

TEST_CASE("identity system returns the right-hand side") {
  const int n = 17;
  SparseMat a(n, n);
  a.setIdentity();
  Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
  Eigen::VectorXd x;
  const PcgResult r = pcg_jacobi(a, b, x, 1e-14, 100);
  CHECK(r.converged);
  CHECK((x - b).norm() <= 1e-13 * b.norm());
}

TEST_CASE("random SPD systems against a dense Cholesky reference") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 30 + 5 * trial;
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) g(i, j) = u(rng);
    }
    const Eigen::MatrixXd dense =
        g.transpose() * g + double(n) * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b(i) = u(rng);

    const SparseMat a = sparse_from_dense(dense);
    Eigen::VectorXd x;
    const PcgResult r = pcg_jacobi(a, b, x, 1e-13, 10 * n);
    CHECK(r.converged);
    CHECK(r.rel_residual <= 1e-13);

    const Eigen::VectorXd ref = dense.ldlt().solve(b);
    CHECK((x - ref).norm() <= 1e-11 * ref.norm());
  }
}

TEST_CASE("zero right-hand side short-circuits to zero") {
  SparseMat a(5, 5);
  a.setIdentity();
  Eigen::VectorXd x;
  const PcgResult r = pcg_jacobi(a, Eigen::VectorXd::Zero(5), x, 1e-12, 50);
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(x.isZero(0.0));
}

TEST_CASE("non-positive diagonal is rejected") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(4, 4);
  d(2, 2) = 0.0;
  // A structurally missing diagonal entry counts as non-positive too.
  Eigen::VectorXd x;
  CHECK_THROWS_AS(
      pcg_jacobi(sparse_from_dense(d), Eigen::VectorXd::Ones(4), x, 1e-12, 50),
      SolverError);
  d(2, 2) = -3.0;
  CHECK_THROWS_AS(
      pcg_jacobi(sparse_from_dense(d), Eigen::VectorXd::Ones(4), x, 1e-12, 50),
      SolverError);
}

TEST_CASE("indefinite matrices are detected through the curvature") {
  Eigen::MatrixXd d(2, 2);
  d << 1.0, 4.0, 4.0, 1.0;  // eigenvalues 5 and -3, diagonal positive
  Eigen::VectorXd b(2);
  b << 1.0, 0.0;  // not an eigenvector, so CG must probe the negative mode
  Eigen::VectorXd x;
  CHECK_THROWS_AS(pcg_jacobi(sparse_from_dense(d), b, x, 1e-12, 50),
                  SolverError);
}

TEST_CASE("iteration cap reports non-convergence") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 50;
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = u(rng);
  }
  const Eigen::MatrixXd dense =
      g.transpose() * g + 0.1 * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd x;
  const PcgResult r = pcg_jacobi(sparse_from_dense(dense), b, x, 1e-15, 2);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
}

TEST_SUITE_END();
