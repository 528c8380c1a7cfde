#pragma once

#include "uqprop/centering.hpp"
#include "uqprop/kernels.hpp"
#include "uqprop/linalg.hpp"

#include <memory>
#include <optional>
#include <string_view>

namespace uqprop {

/// Where the coefficient vector came from. Ridge and GP fits share the same
/// closed form; external covers alpha from SVM or RVM training done elsewhere.
enum class Provenance { ridge, gp, external };

std::string_view provenance_name(Provenance provenance);
Provenance provenance_from_name(std::string_view name);

/// Alpha-form predictor y* = alphaᵀk* + y_mean, with k* evaluated between the
/// transformed test point and the training inputs (stored in model
/// coordinates). Length scales apply in model coordinates.
class KernelModel {
 public:
  /// For ridge/gp provenance the factorization of K + sigma2·I is rebuilt
  /// (needed by the posterior variance); sigma2 = 0 forbids jitter.
  KernelModel(Vector alpha, Matrix train_x, RbfParams params, double sigma2, CenteringTransform centering,
              Provenance provenance);

  /// Same, reusing an existing factorization of K + sigma2·I.
  KernelModel(Vector alpha, Matrix train_x, RbfParams params, double sigma2, CenteringTransform centering,
              Provenance provenance, std::shared_ptr<const linalg::CholeskyResult> system_factor);

  const Vector& alpha() const noexcept { return alpha_; }
  const Matrix& train_x() const noexcept { return train_x_; }
  const RbfParams& params() const noexcept { return params_; }
  double sigma2() const noexcept { return sigma2_; }
  const CenteringTransform& centering() const noexcept { return centering_; }
  Provenance provenance() const noexcept { return provenance_; }
  Index dimension() const noexcept { return train_x_.cols(); }
  Index size() const noexcept { return train_x_.rows(); }

  /// Factorization of K + sigma2·I; null for external models.
  const linalg::CholeskyResult* system_factor() const noexcept { return factor_.get(); }

 private:
  void validate() const;

  Vector alpha_;
  Matrix train_x_;
  RbfParams params_;
  double sigma2_;
  CenteringTransform centering_;
  Provenance provenance_;
  std::shared_ptr<const linalg::CholeskyResult> factor_;
};

struct KernelFitOptions {
  Standardization standardization = Standardization::center_and_scale;
  Provenance provenance = Provenance::ridge;
};

/// Solves (K + sigma2·I)·alpha = y_centered by Cholesky. With sigma2 > 0 one
/// jittered retry is allowed; sigma2 = 0 demands an exactly invertible K.
KernelModel fit_kernel_ridge(const Matrix& x, const Vector& y, const RbfParams& params, double sigma2,
                             const KernelFitOptions& options = {});

/// GP posterior-mean fit; identical solve, provenance gp.
KernelModel fit_gp(const Matrix& x, const Vector& y, const RbfParams& params, double sigma2,
                   Standardization standardization = Standardization::center_and_scale);

/// Wraps coefficients trained elsewhere. `train_x` is in model coordinates.
KernelModel from_external_alpha(Vector alpha, Matrix train_x, RbfParams params, CenteringTransform centering);

double predict(const KernelModel& model, const Vector& xstar);
/// Predictions for every row of `x` (raw input units).
Vector predict_rows(const KernelModel& model, const Matrix& x);

/// GP posterior variance k(x*,x*) - k*ᵀ(K + sigma2·I)⁻¹k*, clamped at 0.
/// This is model uncertainty, not propagated input uncertainty.
double gp_posterior_variance(const KernelModel& model, const Vector& xstar);

struct HyperparameterOptions {
  Standardization standardization = Standardization::center_and_scale;
  /// Optimise one length scale per input dimension after the isotropic search.
  bool ard = false;
  double log10_lambda_min = -3.0;
  double log10_lambda_max = 3.0;
  /// Noise variance grid, relative to the sample variance of y.
  double log10_relative_sigma2_min = -6.0;
  double log10_relative_sigma2_max = 0.0;
  int grid_points_per_axis = 7;
  int max_refinement_iterations = 300;
  /// Worker threads for the grid (0 = default_thread_count()).
  std::size_t threads = 1;
};

struct Hyperparameters {
  RbfParams params;
  double sigma2;
  double log_marginal_likelihood;
};

/// GP log marginal likelihood -1/2 yᵀ(K+σ²I)⁻¹y - 1/2 log|K+σ²I| - n/2 log 2π
/// for inputs already in model coordinates and a centred target. Returns
/// -infinity when K + σ²I is not numerically positive definite.
double log_marginal_likelihood(const Matrix& x_model, const Vector& y_centered, const RbfParams& params, double sigma2);

/// Log-space grid search followed by Nelder-Mead refinement of the log
/// marginal likelihood. Deterministic for given data and options.
Hyperparameters optimize_hyperparameters(const Matrix& x, const Vector& y, const HyperparameterOptions& options = {});

}  // namespace uqprop
