#include "uqprop/kernels.hpp"

#include "uqprop/errors.hpp"

#include <cmath>

namespace uqprop {

RbfParams::RbfParams(Vector lambdas) : lambdas_(std::move(lambdas)) {
  if (lambdas_.size() == 0) throw ContractError("RBF kernel needs at least one length scale");
  if (!lambdas_.allFinite() || !(lambdas_.minCoeff() > 0.0)) {
    throw ContractError("RBF length scales must be finite and positive");
  }
}

RbfParams RbfParams::isotropic(double lambda, Index dimension) {
  return RbfParams(Vector::Constant(dimension, lambda));
}

double rbf(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2, const RbfParams& params) {
  if (x.size() != params.dimension()) throw DimensionMismatch("rbf first argument", params.dimension(), x.size());
  if (x2.size() != params.dimension()) throw DimensionMismatch("rbf second argument", params.dimension(), x2.size());
  const double d2 = ((x - x2).array() / params.lambdas().array()).square().sum();
  return std::exp(-0.5 * d2);
}

Matrix kernel_matrix(const Matrix& x, const RbfParams& params) {
  if (x.cols() != params.dimension()) throw DimensionMismatch("kernel matrix inputs", params.dimension(), x.cols());
  const Index n = x.rows();
  if (n < 1) throw ContractError("kernel matrix needs at least one row");
  const Vector inv = params.lambdas().cwiseInverse();
  const Index m = x.cols();
  Matrix k(n, n);
  for (Index j = 0; j < n; ++j) {
    k(j, j) = 1.0;
    for (Index i = j + 1; i < n; ++i) {
      double d2 = 0.0;
      for (Index p = 0; p < m; ++p) {
        const double t = (x(i, p) - x(j, p)) * inv(p);
        d2 += t * t;
      }
      const double value = std::exp(-0.5 * d2);
      k(i, j) = value;
      k(j, i) = value;
    }
  }
  return k;
}

Vector kstar(const Matrix& x, const Eigen::Ref<const Vector>& xstar, const RbfParams& params) {
  if (x.cols() != params.dimension()) throw DimensionMismatch("kstar training inputs", params.dimension(), x.cols());
  if (xstar.size() != params.dimension()) throw DimensionMismatch("kstar test point", params.dimension(), xstar.size());
  const Index n = x.rows();
  Vector k(n);
  for (Index i = 0; i < n; ++i) {
    k(i) = std::exp(-0.5 * ((x.row(i).transpose() - xstar).array() / params.lambdas().array()).square().sum());
  }
  return k;
}

}  // namespace uqprop
