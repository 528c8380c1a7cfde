#include "oracles.hpp"

#include "uqprop/errors.hpp"
#include "uqprop/kernels.hpp"

#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>

using namespace uqprop;

TEST_CASE("rbf examples") {
  std::mt19937_64 g(1);
  const Vector x = oracle::random_vector(g, 3);
  const auto p = RbfParams(oracle::random_vector(g, 3, 0.2, 2.0));
  CHECK(rbf(x, x, p) == 1.0);
  const Vector a = (Vector(1) << 0.3).finished();
  const Vector b = (Vector(1) << 0.3 + 1.7).finished();
  CHECK(rbf(a, b, RbfParams::isotropic(1.7, 1)) == doctest::Approx(0.6065306597126334).epsilon(1e-15));
}

TEST_CASE("rbf is separable, symmetric and bounded") {
  std::mt19937_64 g(2);
  for (int k = 0; k < 500; ++k) {
    const Vector x = oracle::random_vector(g, 3, -2, 2), y = oracle::random_vector(g, 3, -2, 2);
    const Vector lam = oracle::random_vector(g, 3, 0.5, 3.0);
    const RbfParams p(lam);
    double product = 1.0;
    for (Index d = 0; d < 3; ++d) {
      product *= rbf(x.segment(d, 1), y.segment(d, 1), RbfParams(lam.segment(d, 1)));
    }
    const double v = rbf(x, y, p);
    CHECK(std::abs(v - product) <= 1e-15);
    CHECK(v == rbf(y, x, p));
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
    CHECK(std::abs(v - oracle::rbf(x, y, lam)) <= 1e-15);
    // Moving one coordinate further away decreases the value.
    Vector z = y;
    z(0) = x(0) + 1.5 * (y(0) - x(0)) + (y(0) >= x(0) ? 0.1 : -0.1);
    CHECK(rbf(x, z, p) < v);
  }
}

TEST_CASE("rbf contract errors") {
  CHECK_THROWS_AS(RbfParams((Vector(2) << 1.0, 0.0).finished()), ContractError);
  CHECK_THROWS_AS(RbfParams((Vector(1) << -1.0).finished()), ContractError);
  CHECK_THROWS_AS(RbfParams(Vector(0)), ContractError);
  CHECK_THROWS_AS(rbf(Vector::Zero(2), Vector::Zero(3), RbfParams::isotropic(1, 2)), DimensionMismatch);
  CHECK_THROWS_AS(rbf(Vector::Zero(2), Vector::Zero(2), RbfParams::isotropic(1, 3)), DimensionMismatch);
}

TEST_CASE("kernel_matrix") {
  CHECK(kernel_matrix(Matrix::Zero(1, 2), RbfParams::isotropic(1, 2)) == Matrix::Ones(1, 1));
  Matrix twin(2, 2);
  twin << 0.5, -1, 0.5, -1;
  CHECK(kernel_matrix(twin, RbfParams::isotropic(0.7, 2)) == Matrix::Ones(2, 2));

  std::mt19937_64 g(3);
  const Matrix x = oracle::random_matrix(g, 10, 2, -2, 2);
  const Vector lam = (Vector(2) << 0.5, 1.3).finished();
  const Matrix k = kernel_matrix(x, RbfParams(lam));
  for (Index i = 0; i < 10; ++i) {
    CHECK(k(i, i) == 1.0);
    for (Index j = 0; j < 10; ++j) {
      CHECK(k(i, j) == k(j, i));
      CHECK(std::abs(k(i, j) - oracle::rbf(x.row(i).transpose(), x.row(j).transpose(), lam)) <= 1e-15);
    }
  }
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(k).eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("kernel_matrix permutation equivariance and regularised definiteness") {
  std::mt19937_64 g(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + static_cast<Index>(g() % 30);
    const Matrix x = oracle::random_matrix(g, n, 3, -1, 1);
    const RbfParams p(oracle::random_vector(g, 3, 0.3, 3.0));
    const Matrix k = kernel_matrix(x, p);
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g);
    Matrix xp(n, 3);
    for (Index i = 0; i < n; ++i) xp.row(i) = x.row(perm[i]);
    const Matrix kp = kernel_matrix(xp, p);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) CHECK(kp(i, j) == k(perm[i], perm[j]));
    for (double s2 : {1e-8, 1e-3, 1.0}) {
      Eigen::LLT<Matrix> llt(k + s2 * Matrix::Identity(n, n));
      CHECK(llt.info() == Eigen::Success);
    }
  }
}

TEST_CASE("kstar") {
  std::mt19937_64 g(5);
  const Matrix x = oracle::random_matrix(g, 8, 2);
  const Vector lam = (Vector(2) << 0.4, 0.9).finished();
  const RbfParams p(lam);
  CHECK(kstar(x, x.row(0).transpose(), p)(0) == 1.0);
  const Vector far = (Vector(2) << 100.0, -100.0).finished();
  CHECK(kstar(x, far, p).maxCoeff() < 1e-10);
  const Vector xs = oracle::random_vector(g, 2);
  const Vector ks = kstar(x, xs, p);
  for (Index i = 0; i < 8; ++i) {
    CHECK(std::abs(ks(i) - oracle::rbf(x.row(i).transpose(), xs, lam)) <= 1e-15);
    CHECK(ks(i) > 0.0);
    CHECK(ks(i) <= 1.0);
  }
  CHECK_THROWS_AS(kstar(x, Vector::Zero(3), p), DimensionMismatch);
}
