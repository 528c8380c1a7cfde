#pragma once

#include <cstdint>

namespace uqprop {

/// Single-pass accumulator of central moments up to fourth order
/// (Welford/Terriberry updates, Pébay's pairwise merge). Merging two
/// accumulators is exact in exact arithmetic, so block results can be
/// combined in a fixed order independent of how blocks were scheduled.
class RunningMoments {
 public:
  void add(double x) noexcept;
  void merge(const RunningMoments& other) noexcept;

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance (0 for fewer than two samples).
  double variance() const noexcept;
  /// Biased central fourth moment M4 / n.
  double fourth_central_moment() const noexcept;

  /// s / sqrt(n).
  double standard_error_of_mean() const noexcept;
  /// sqrt((m4 - s⁴ (n-3)/(n-1)) / n), the large-sample standard error of the
  /// sample variance from the fourth central moment.
  double standard_error_of_variance() const noexcept;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

}  // namespace uqprop
