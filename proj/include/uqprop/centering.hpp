#pragma once

#include "uqprop/distributions.hpp"
#include "uqprop/linalg.hpp"

namespace uqprop {

/// How training data is preprocessed before a fit.
enum class Standardization {
  none,              // identity transform; data assumed already centred
  center,            // subtract column means and the target mean
  center_and_scale,  // additionally divide columns by their sample standard deviation
};

/// Affine map from raw inputs to model coordinates, z = (x - x_mean) / x_scale,
/// plus the target offset. Predictions are model(z) + y_mean.
class CenteringTransform {
 public:
  CenteringTransform(Vector x_mean, Vector x_scale, double y_mean);

  static CenteringTransform identity(Index dimension);

  /// Transform estimated from training data. Throws ContractError when
  /// scaling is requested and a column has zero variance.
  static CenteringTransform estimate(const Matrix& x, const Vector& y, Standardization mode);

  const Vector& x_mean() const noexcept { return x_mean_; }
  const Vector& x_scale() const noexcept { return x_scale_; }
  double y_mean() const noexcept { return y_mean_; }
  Index dimension() const noexcept { return x_mean_.size(); }

  Vector apply(const Vector& x) const;
  /// Applies the map to every row of `x`.
  Matrix apply_rows(const Matrix& x) const;

  /// The input distribution expressed in model coordinates.
  InputDistribution apply(const InputDistribution& distribution) const;

 private:
  Vector x_mean_;
  Vector x_scale_;
  double y_mean_;
};

}  // namespace uqprop
