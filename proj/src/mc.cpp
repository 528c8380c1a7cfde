#include "uqprop/mc.hpp"

#include "uqprop/errors.hpp"
#include "uqprop/parallel.hpp"
#include "uqprop/propagation.hpp"
#include "uqprop/running_moments.hpp"

#include <cmath>
#include <vector>

namespace uqprop {

namespace {

Vector predict_block(const Model& model, const Matrix& rows) {
  return std::visit([&](const auto& m) { return predict_rows(m, rows); }, model);
}

}  // namespace

Index input_dimension(const Model& model) {
  return std::visit([](const auto& m) { return m.dimension(); }, model);
}

Moments propagate(const Model& model, const InputDistribution& distribution) {
  return std::visit([&](const auto& m) { return propagate(m, distribution); }, model);
}

double predict(const Model& model, const Vector& x) {
  return std::visit([&](const auto& m) { return predict(m, x); }, model);
}

MCEstimate mc_propagate(const Model& model, const InputDistribution& distribution, std::uint64_t samples,
                        std::uint64_t seed, const MCOptions& options) {
  if (samples < 2) throw ContractError("Monte Carlo propagation needs at least 2 samples");
  if (distribution.dimension() != input_dimension(model)) {
    throw DimensionMismatch("Monte Carlo input distribution", input_dimension(model), distribution.dimension());
  }
  const Sampler sampler(distribution);
  const auto block = static_cast<std::uint64_t>(kMonteCarloBlock);
  const std::size_t blocks = static_cast<std::size_t>((samples + block - 1) / block);

  std::vector<RunningMoments> partial(blocks);
  parallel::for_each_index(blocks, options.threads, [&](std::size_t b) {
    const std::uint64_t begin = b * block;
    const auto count = static_cast<Index>(std::min(block, samples - begin));
    rng::Stream stream(seed, b);
    Matrix rows(count, sampler.dimension());
    sampler.draw(stream, rows);
    const Vector y = predict_block(model, rows);
    RunningMoments acc;
    for (Index r = 0; r < count; ++r) acc.add(y(r));
    partial[b] = acc;
  });

  RunningMoments total;
  for (const auto& p : partial) total.merge(p);

  MCEstimate estimate;
  estimate.mean = total.mean();
  estimate.variance = total.variance();
  estimate.se_mean = total.standard_error_of_mean();
  estimate.se_variance = total.standard_error_of_variance();
  estimate.samples = samples;
  estimate.seed = seed;
  return estimate;
}

Kappa kappa_rmse(std::span<const Moments> analytical, std::span<const MCEstimate> mc) {
  if (analytical.size() != mc.size()) {
    throw DimensionMismatch("kappa_rmse list lengths", static_cast<long>(analytical.size()),
                            static_cast<long>(mc.size()));
  }
  if (analytical.empty()) throw ContractError("kappa_rmse needs at least one point");
  double sum_mean = 0.0;
  double sum_var = 0.0;
  for (std::size_t i = 0; i < analytical.size(); ++i) {
    const double dm = analytical[i].mean - mc[i].mean;
    const double dv = analytical[i].variance - mc[i].variance;
    sum_mean += dm * dm;
    sum_var += dv * dv;
  }
  const double n = static_cast<double>(analytical.size());
  return {std::sqrt(sum_mean / n), std::sqrt(sum_var / n)};
}

}  // namespace uqprop
