#pragma once

#include "uqprop/distributions.hpp"
#include "uqprop/kernel_models.hpp"
#include "uqprop/linear.hpp"
#include "uqprop/moments.hpp"

#include <cstdint>
#include <span>
#include <variant>

namespace uqprop {

struct MCEstimate {
  double mean = 0.0;
  double variance = 0.0;
  double se_mean = 0.0;
  double se_variance = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

using Model = std::variant<LinearModel, KernelModel>;

struct MCOptions {
  /// Worker threads (0 = parallel::default_thread_count()). Results do not
  /// depend on this value.
  std::size_t threads = 0;
};

/// Samples handled by one RNG stream; block b draws from stream b.
inline constexpr Index kMonteCarloBlock = 8192;

/// Monte Carlo estimate of the output mean and variance over `samples`
/// input draws. Bit-reproducible for a fixed seed regardless of threads.
MCEstimate mc_propagate(const Model& model, const InputDistribution& distribution, std::uint64_t samples,
                        std::uint64_t seed, const MCOptions& options = {});

/// Point-by-point analytical propagation for either model type.
Moments propagate(const Model& model, const InputDistribution& distribution);
double predict(const Model& model, const Vector& x);
Index input_dimension(const Model& model);

struct Kappa {
  double mean = 0.0;      // RMSE of mean differences
  double variance = 0.0;  // RMSE of variance differences
};

/// RMSE between analytical and Monte Carlo moments over a test set.
Kappa kappa_rmse(std::span<const Moments> analytical, std::span<const MCEstimate> mc);

}  // namespace uqprop
