#include "oracles.hpp"

#include "uqprop/errors.hpp"
#include "uqprop/linear.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace uqprop;

namespace {

const LinearFitOptions kNone{Standardization::none};

// Column means / sample standard deviations computed directly.
struct Standardized {
  Matrix c;
  Vector y;
};

Standardized standardize(const Matrix& x, const Vector& y) {
  const double n = static_cast<double>(x.rows());
  Standardized s{x, y.array() - y.mean()};
  for (Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    const double sd = std::sqrt((x.col(j).array() - mean).square().sum() / (n - 1.0));
    s.c.col(j) = (x.col(j).array() - mean) / sd;
  }
  return s;
}

LinearModel centred_model(const Vector& beta) { return LinearModel(beta, CenteringTransform::identity(beta.size())); }

}  // namespace

TEST_CASE("CenteringTransform") {
  Matrix x(3, 2);
  x << 1, 5, 2, 5, 3, 5;
  const Vector y = (Vector(3) << 1, 2, 3).finished();
  CHECK_THROWS_AS(CenteringTransform::estimate(x, y, Standardization::center_and_scale), ContractError);
  const auto c = CenteringTransform::estimate(x, y, Standardization::center);
  CHECK(c.x_mean()(0) == 2.0);
  CHECK(c.x_scale()(1) == 1.0);
  CHECK(c.y_mean() == 2.0);
  CHECK_THROWS_AS(CenteringTransform(Vector::Zero(2), Vector::Zero(2), 0.0), ContractError);
  CHECK_THROWS_AS(CenteringTransform(Vector::Zero(2), Vector::Ones(3), 0.0), DimensionMismatch);
}

TEST_CASE("fit_ols examples") {
  Matrix x(3, 1);
  x << 1, 2, 3;
  const Vector y = (Vector(3) << 2, 4, 6).finished();
  CHECK(fit_ols(x, y, kNone).beta()(0) == doctest::Approx(2.0).epsilon(1e-14));

  Matrix xo(4, 1);
  xo << 1, -1, 1, -1;
  const Vector yo = (Vector(4) << 1, 1, -1, -1).finished();
  CHECK(std::abs(fit_ols(xo, yo, kNone).beta()(0)) < 1e-15);
}

TEST_CASE("fit_ols matches the normal equations") {
  std::mt19937_64 g(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = oracle::random_matrix(g, 50, 4, -3.0, 3.0);
    const Vector y = oracle::random_vector(g, 50, -2.0, 2.0) + x * oracle::random_vector(g, 4);
    const auto s = standardize(x, y);
    const Vector oracle_beta = oracle::dense_solve(s.c.transpose() * s.c, s.c.transpose() * s.y);
    const auto model = fit_ols(x, y);
    CHECK((model.beta() - oracle_beta).norm() <= 1e-10 * std::max(1.0, oracle_beta.norm()));
    const Vector gradient = s.c.transpose() * (s.y - s.c * model.beta());
    CHECK(gradient.norm() <= 1e-8 * (s.c.transpose() * s.y).norm());
    // Training predictions reproduce the fitted values of the oracle solve.
    const Vector fitted = s.c * oracle_beta + Vector::Constant(50, y.mean());
    CHECK((predict_rows(model, x) - fitted).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("fit_ols reports rank deficiency") {
  std::mt19937_64 g(6);
  Matrix x = oracle::random_matrix(g, 20, 3);
  x.col(2) = x.col(0) + 2.0 * x.col(1);
  const Vector y = oracle::random_vector(g, 20);
  try {
    fit_ols(x, y, {Standardization::center});
    FAIL("expected SingularMatrixError");
  } catch (const SingularMatrixError& e) {
    CHECK(e.rank() == 2);
  }
  CHECK_THROWS_AS(fit_ols(oracle::random_matrix(g, 2, 3), oracle::random_vector(g, 2), kNone), SingularMatrixError);
  CHECK_THROWS_AS(fit_ols(oracle::random_matrix(g, 4, 2), oracle::random_vector(g, 3)), DimensionMismatch);
}

TEST_CASE("fit_ridge") {
  std::mt19937_64 g(7);
  const Matrix x = oracle::random_matrix(g, 20, 5);
  const Vector y = oracle::random_vector(g, 20);
  const auto s = standardize(x, y);

  SUBCASE("direct solve oracle") {
    const Matrix a = s.c.transpose() * s.c + 0.7 * Matrix::Identity(5, 5);
    const Vector oracle_beta = oracle::dense_solve(a, s.c.transpose() * s.y);
    CHECK((fit_ridge(x, y, 0.7).beta() - oracle_beta).norm() < 1e-10);
  }
  SUBCASE("sigma2 = 0 reduces to OLS") {
    const Vector ridge = fit_ridge(x, y, 0.0).beta();
    const Vector ols = fit_ols(x, y).beta();
    CHECK((ridge - ols).norm() <= 1e-10 * ols.norm());
  }
  SUBCASE("shrinkage limit") {
    const auto model = fit_ridge(x, y, 1e12);
    CHECK(model.beta().norm() <= 1e-9 * (s.c.transpose() * s.y).norm());
  }
  SUBCASE("underdetermined with positive sigma2") {
    const Matrix xw = oracle::random_matrix(g, 4, 8);
    CHECK_NOTHROW(fit_ridge(xw, oracle::random_vector(g, 4), 0.1, kNone));
  }
  SUBCASE("negative sigma2") {
    try {
      fit_ridge(x, y, -0.1);
      FAIL("expected ContractError");
    } catch (const ContractError& e) {
      CHECK(std::string(e.what()).find("sigma2") != std::string::npos);
    }
  }
}

TEST_CASE("predict examples") {
  const LinearModel zero(Vector::Zero(2), CenteringTransform(Vector::Ones(2), Vector::Ones(2), 3.5));
  CHECK(predict(zero, (Vector(2) << 10, -4).finished()) == 3.5);
  const LinearModel m((Vector(2) << 2, -1).finished(), CenteringTransform(Vector::Zero(2), Vector::Ones(2), 1.25));
  CHECK(predict(m, (Vector(2) << 3, 4).finished()) == 1.25 + 2.0);
  CHECK_THROWS_AS(predict(m, Vector::Zero(3)), DimensionMismatch);
}

TEST_CASE("propagate examples") {
  const auto model = centred_model((Vector(2) << 2, -1).finished());
  const auto r = propagate(model, GaussianInput((Vector(2) << 3, 4).finished(), Matrix::Identity(2, 2)));
  CHECK(r.mean == 2.0);
  CHECK(r.variance == 5.0);
  CHECK(r.family == OutputFamily::gaussian);

  const Vector mu = (Vector(2) << -0.3, 8.0).finished();
  const auto zero = propagate(model, GaussianInput(mu, Matrix::Zero(2, 2)));
  CHECK(zero.variance == 0.0);
  CHECK(zero.mean == predict(model, mu));

  const auto ind = propagate(model, IndependentInput({Uniform(0, 1), Normal(1, 2)}));
  CHECK(ind.family == OutputFamily::unspecified);
  CHECK(ind.mean == doctest::Approx(2 * 0.5 - 1.0));
  CHECK(ind.variance == doctest::Approx(4.0 / 12.0 + 2.0));

  CHECK_THROWS_AS(propagate(model, GaussianInput(Vector::Zero(3), Matrix::Identity(3, 3))), DimensionMismatch);
}

TEST_CASE("propagation through a standardized fit equals raw-unit evaluation") {
  std::mt19937_64 g(8);
  const Matrix x = oracle::random_matrix(g, 40, 3, -5.0, 5.0);
  Matrix xs = x;
  xs.col(1) *= 50.0;
  const Vector y = oracle::random_vector(g, 40);
  const auto model = fit_ols(xs, y);
  const Vector mu = oracle::random_vector(g, 3, -2.0, 2.0);
  const Matrix gamma = oracle::random_psd(g, 3);
  const auto r = propagate(model, GaussianInput(mu, gamma));
  // Raw-unit slope recovered by differencing predictions.
  Vector w(3);
  for (Index p = 0; p < 3; ++p) w(p) = predict(model, Vector::Unit(3, p)) - predict(model, Vector::Zero(3));
  CHECK(r.mean == doctest::Approx(predict(model, mu)).epsilon(1e-12));
  CHECK(r.variance == doctest::Approx(w.dot(gamma * w)).epsilon(1e-9));
}

TEST_CASE("propagation invariants on random instances") {
  std::mt19937_64 g(9);
  for (int trial = 0; trial < 200; ++trial) {
    const Index m = 1 + static_cast<Index>(g() % 12);
    const auto beta = oracle::random_vector(g, m, -3.0, 3.0);
    const Vector mu = oracle::random_vector(g, m);
    Matrix gamma = oracle::random_psd(g, m, 2.0);
    if (trial % 4 == 0) {
      // rank one
      const Vector v = oracle::random_vector(g, m);
      gamma = v * v.transpose();
    }
    const auto model = centred_model(beta);
    const auto r = propagate(model, GaussianInput(mu, gamma));
    CHECK(r.variance >= 0.0);

    std::vector<Index> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g);
    Vector pbeta(m), pmu(m);
    Matrix pgamma(m, m);
    for (Index i = 0; i < m; ++i) {
      pbeta(i) = beta(perm[i]);
      pmu(i) = mu(perm[i]);
      for (Index j = 0; j < m; ++j) pgamma(i, j) = gamma(perm[i], perm[j]);
    }
    const auto rp = propagate(centred_model(pbeta), GaussianInput(pmu, pgamma));
    CHECK(rp.variance == doctest::Approx(r.variance).epsilon(1e-12));
    CHECK(rp.mean == doctest::Approx(r.mean).epsilon(1e-12));

    const Vector diag = gamma.diagonal();
    double sum = 0.0;
    for (Index i = 0; i < m; ++i) sum += beta(i) * beta(i) * diag(i);
    const auto rd = propagate(model, GaussianInput(mu, Matrix(diag.asDiagonal())));
    CHECK(rd.variance == doctest::Approx(sum).epsilon(1e-14));
  }
}

TEST_CASE("credible_interval") {
  const auto ci = credible_interval({0.0, 1.0, OutputFamily::gaussian}, 0.95);
  CHECK(std::abs(ci.lower + 1.959964) < 1e-5);
  CHECK(std::abs(ci.upper - 1.959964) < 1e-5);
  // z from a bisection on the quadrature cdf
  double lo = 0.0, hi = 5.0;
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    (oracle::normal_cdf(mid) < 0.975 ? lo : hi) = mid;
  }
  CHECK(std::abs(ci.upper - lo) < 1e-9);

  const auto point = credible_interval({3.0, 0.0, OutputFamily::gaussian}, 0.9);
  CHECK(point.lower == 3.0);
  CHECK(point.upper == 3.0);
  const auto shifted = credible_interval({1.0, 4.0, OutputFamily::gaussian}, 0.5);
  CHECK(shifted.upper - 1.0 == doctest::Approx(1.0 - shifted.lower));
  CHECK_THROWS_AS(credible_interval({0.0, 1.0, OutputFamily::unspecified}, 0.95), UnsupportedError);
  CHECK_THROWS_AS(credible_interval({0.0, 1.0, OutputFamily::gaussian}, 1.0), ContractError);
}

TEST_CASE("clamp_variance") {
  CHECK(clamp_variance(-5e-13, 1e-12, "t") == 0.0);
  CHECK(clamp_variance(0.25, 1e-12, "t") == 0.25);
  CHECK_THROWS_AS(clamp_variance(-1e-9, 1e-12, "t"), ConsistencyError);
}
