#pragma once

#include "uqprop/centering.hpp"
#include "uqprop/distributions.hpp"
#include "uqprop/moments.hpp"

namespace uqprop {

/// y = betaᵀ·transform(x) + y_mean.
class LinearModel {
 public:
  LinearModel(Vector beta, CenteringTransform centering);

  const Vector& beta() const noexcept { return beta_; }
  const CenteringTransform& centering() const noexcept { return centering_; }
  Index dimension() const noexcept { return beta_.size(); }

  /// Weights with respect to raw inputs: beta ./ x_scale.
  Vector raw_weights() const;

 private:
  Vector beta_;
  CenteringTransform centering_;
};

struct LinearFitOptions {
  Standardization standardization = Standardization::center_and_scale;
};

/// Least squares via column-pivoted QR. Throws SingularMatrixError with the
/// detected rank when the (preprocessed) design is rank deficient.
LinearModel fit_ols(const Matrix& x, const Vector& y, const LinearFitOptions& options = {});

/// Ridge regression beta = (CᵀC + sigma2·I)⁻¹Cᵀy via Cholesky; sigma2 = 0
/// delegates to fit_ols.
LinearModel fit_ridge(const Matrix& x, const Vector& y, double sigma2, const LinearFitOptions& options = {});

double predict(const LinearModel& model, const Vector& x);
/// Predictions for every row of `x` (raw input units).
Vector predict_rows(const LinearModel& model, const Matrix& x);

/// Exact mean betaᵀmu and variance betaᵀ·Gamma·beta (in model coordinates).
/// The output is tagged Gaussian iff the input is the Gaussian variant.
Moments propagate(const LinearModel& model, const InputDistribution& distribution);

/// Symmetric interval mean ± z·sd with Phi(z) = (1 + coverage)/2. Requires a
/// Gaussian-tagged output.
Interval credible_interval(const Moments& moments, double coverage);

}  // namespace uqprop
