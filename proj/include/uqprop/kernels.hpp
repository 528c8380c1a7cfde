#pragma once

#include "uqprop/linalg.hpp"

namespace uqprop {

/// Length scales of the squared-exponential kernel
/// k(x, x') = exp(-1/2 Σ_p (x_p - x'_p)² / λ_p²). Equal entries give the
/// isotropic kernel.
class RbfParams {
 public:
  explicit RbfParams(Vector lambdas);

  static RbfParams isotropic(double lambda, Index dimension);

  const Vector& lambdas() const noexcept { return lambdas_; }
  Index dimension() const noexcept { return lambdas_.size(); }

 private:
  Vector lambdas_;
};

double rbf(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2, const RbfParams& params);

/// Gram matrix K_ij = k(x_i, x_j) over the rows of `x`.
Matrix kernel_matrix(const Matrix& x, const RbfParams& params);

/// k*_i = k(xstar, x_i).
Vector kstar(const Matrix& x, const Eigen::Ref<const Vector>& xstar, const RbfParams& params);

}  // namespace uqprop
