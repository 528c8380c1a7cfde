#pragma once

namespace uqprop {

enum class OutputFamily { unspecified, gaussian };

/// Propagated mean and variance of a point prediction. `family` is gaussian
/// only when the output distribution is known to be normal (linear model
/// with Gaussian input).
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  OutputFamily family = OutputFamily::unspecified;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Clamps rounding noise in a variance: values in [-tolerance, 0) become 0,
/// anything more negative throws ConsistencyError.
double clamp_variance(double variance, double tolerance, const char* context);

}  // namespace uqprop
