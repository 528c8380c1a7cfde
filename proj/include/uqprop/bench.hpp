#pragma once

#include "uqprop/distributions.hpp"
#include "uqprop/linear.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace uqprop::bench {

/// Mean-of-m linear model with mu = 0.5·1 and Toeplitz covariance
/// Gamma_ij = 0.1 · 2^-|i-j|.
struct LinearProblem {
  LinearModel model;
  GaussianInput input;
};

LinearProblem synth_linear_problem(Index m);

/// f(x) = 2 (x/10 + sin(4x/10) + sin(13x/10)), intended domain [-5, 5].
double bachstein(double x);
bool bachstein_in_domain(double x);

struct RegressionData {
  Matrix x;
  Vector y;
};

/// n inputs uniform on [-5, 5] with targets f(x) + N(0, sigma²) noise.
RegressionData gen_bachstein_dataset(Index n, double sigma, std::uint64_t seed);

enum class Kind { linear, kernel };
enum class Method { analytical, mc };

std::string_view kind_name(Kind kind);
Kind kind_from_name(std::string_view name);
std::string_view method_name(Method method);
Method method_from_name(std::string_view name);

struct Row {
  Method method;
  Index size;                              // m (linear) or n (kernel)
  std::optional<std::uint64_t> mc_samples;  // only for Monte Carlo rows
  int rep;
  double seconds;
};

struct Slope {
  Method method;
  std::optional<std::uint64_t> mc_samples;
  double slope;
};

struct Report {
  Kind kind;
  Index slope_min_size;
  std::vector<Row> rows;
  std::vector<Slope> slopes;
};

struct Config {
  Kind kind = Kind::linear;
  std::vector<Index> sizes = {100, 317, 1000, 3163, 10000};
  std::vector<std::uint64_t> mc_samples = {100, 1000, 10000};
  int reps = 3;
  std::uint64_t seed = 0;
  /// Only sizes at or above this enter the slope fit (all sizes when fewer
  /// than two qualify).
  Index slope_min_size = 1000;
  /// Monte Carlo rows are skipped above this size (0 = never skipped).
  Index mc_max_size = 0;
  /// Let Monte Carlo use worker threads; off so slopes reflect algorithmic cost.
  bool parallel = false;
};

/// Times analytical propagation and Monte Carlo at each size. Setup (problem
/// generation, model fitting) is excluded from the timings. Sizes at or
/// below 1000 get at least 5 repetitions.
Report run_scaling_benchmark(const Config& config);

/// Least-squares slope of log(seconds) against log(size).
double fit_slope(std::span<const std::pair<double, double>> points);

/// Slopes of median-of-reps timings per (method, mc_samples) series; a pure
/// function of the rows.
std::vector<Slope> fit_slopes(const std::vector<Row>& rows, Index slope_min_size);

}  // namespace uqprop::bench
