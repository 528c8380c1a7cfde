#pragma once

#include "uqprop/linalg.hpp"
#include "uqprop/rng.hpp"

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace uqprop {

/// Multivariate Gaussian input N(mu, gamma). gamma must be symmetric and
/// positive semi-definite (negative eigenvalues down to -1e-10 tolerated).
class GaussianInput {
 public:
  GaussianInput(Vector mu, Matrix gamma);

  const Vector& mean() const noexcept { return mu_; }
  const Matrix& covariance() const noexcept { return gamma_; }
  Index dimension() const noexcept { return mu_.size(); }

 private:
  Vector mu_;
  Matrix gamma_;
};

class Uniform {
 public:
  Uniform(double a, double b);

  double lower() const noexcept { return a_; }
  double upper() const noexcept { return b_; }
  double mean() const noexcept { return 0.5 * (a_ + b_); }
  double variance() const noexcept { return (b_ - a_) * (b_ - a_) / 12.0; }

 private:
  double a_;
  double b_;
};

/// Symmetric triangular distribution on [a, b] with its mode at the midpoint.
class Triangular {
 public:
  Triangular(double a, double b);

  double lower() const noexcept { return a_; }
  double upper() const noexcept { return b_; }
  double mean() const noexcept { return 0.5 * (a_ + b_); }
  double variance() const noexcept { return (b_ - a_) * (b_ - a_) / 24.0; }

 private:
  double a_;
  double b_;
};

class Normal {
 public:
  Normal(double mean, double variance);

  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }

 private:
  double mean_;
  double variance_;
};

using UnivariateFamily = std::variant<Uniform, Triangular, Normal>;

double mean(const UnivariateFamily& family);
double variance(const UnivariateFamily& family);
std::string_view family_name(const UnivariateFamily& family);

/// Independent per-coordinate input distribution.
class IndependentInput {
 public:
  explicit IndependentInput(std::vector<UnivariateFamily> components);

  const std::vector<UnivariateFamily>& components() const noexcept { return components_; }
  Index dimension() const noexcept { return static_cast<Index>(components_.size()); }

 private:
  std::vector<UnivariateFamily> components_;
};

class InputDistribution {
 public:
  InputDistribution(GaussianInput gaussian) : value_(std::move(gaussian)) {}
  InputDistribution(IndependentInput independent) : value_(std::move(independent)) {}

  bool is_gaussian() const noexcept { return std::holds_alternative<GaussianInput>(value_); }
  const GaussianInput& gaussian() const { return std::get<GaussianInput>(value_); }
  const IndependentInput& independent() const { return std::get<IndependentInput>(value_); }
  const std::variant<GaussianInput, IndependentInput>& value() const noexcept { return value_; }
  Index dimension() const noexcept;

 private:
  std::variant<GaussianInput, IndependentInput> value_;
};

struct MeanCovariance {
  Vector mean;
  Matrix covariance;
};

/// First two moments. Independent inputs give a diagonal covariance.
MeanCovariance moments(const InputDistribution& distribution);

enum class IntervalFamily { uniform, triangular };

/// Interval distribution centred at `center` with the requested variance:
/// width sqrt(12 var) for uniform, sqrt(24 var) for symmetric triangular.
UnivariateFamily family_from_variance(IntervalFamily kind, double center, double variance);

/// Same distribution translated so that its mean is `center`.
InputDistribution recentered(const InputDistribution& distribution, const Vector& center);

/// Standard normal CDF via erfc; rejects non-finite input.
double std_normal_cdf(double x);

/// z with std_normal_cdf(z) = p, for p in (0, 1).
double std_normal_quantile(double p);

/// Prepared sampler. Gaussian inputs are factorized once at construction.
class Sampler {
 public:
  explicit Sampler(const InputDistribution& distribution);

  Index dimension() const noexcept { return dimension_; }

  /// Fills `out` (count x m) with draws taken sequentially from `stream`.
  void draw(rng::Stream& stream, Eigen::Ref<Matrix> out) const;
  Matrix draw(Index count, std::uint64_t seed, std::uint64_t stream_id = 0) const;

 private:
  InputDistribution distribution_;
  Index dimension_;
  Matrix factor_;  // A with A·Aᵀ = gamma (Gaussian variant only)
};

/// count x m matrix of draws; bit-reproducible for fixed (seed, stream_id).
Matrix sample(const InputDistribution& distribution, Index count, std::uint64_t seed, std::uint64_t stream_id = 0);

}  // namespace uqprop
