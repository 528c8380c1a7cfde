#include "uqprop/linalg.hpp"

#include "uqprop/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace uqprop::linalg {

CholeskyResult cholesky_with_jitter(const Matrix& a, const std::string& context, bool allow_jitter) {
  CholeskyResult result;
  result.factor.compute(a);
  if (result.factor.info() == Eigen::Success) return result;

  const double jitter = a.rows() > 0 ? kJitterScale * a.diagonal().mean() : 0.0;
  if (!allow_jitter || !(jitter > 0.0)) {
    throw FactorizationError(context + ": Cholesky factorization failed", allow_jitter ? jitter : 0.0);
  }
  Matrix shifted = a;
  shifted.diagonal().array() += jitter;
  result.factor.compute(shifted);
  if (result.factor.info() != Eigen::Success) {
    throw FactorizationError(context + ": Cholesky factorization failed after jitter retry", jitter);
  }
  result.jitter = jitter;
  return result;
}

bool is_symmetric(const Matrix& a, double tolerance) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tolerance * scale;
}

bool is_positive_semidefinite(const Matrix& a) {
  if (a.rows() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) return false;
  const auto& values = solver.eigenvalues();
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  return values.minCoeff() >= -kPsdTolerance * scale;
}

Matrix covariance_factor(const Matrix& cov) {
  {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  const double jitter = cov.rows() > 0 ? kJitterScale * cov.trace() / static_cast<double>(cov.rows()) : 0.0;
  if (jitter > 0.0) {
    Matrix shifted = cov;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw FactorizationError("covariance factorization: eigen decomposition failed", jitter);
  }
  Vector values = solver.eigenvalues();
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  if (values.size() > 0 && values.minCoeff() < -kPsdTolerance * scale) {
    throw FactorizationError("covariance factorization: matrix is not positive semi-definite", jitter);
  }
  values = values.cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * values.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace uqprop::linalg
