#include "uqprop/bench.hpp"

#include "uqprop/errors.hpp"
#include "uqprop/kernel_models.hpp"
#include "uqprop/mc.hpp"
#include "uqprop/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <map>
#include <string>

namespace uqprop::bench {

LinearProblem synth_linear_problem(Index m) {
  if (m < 1) throw ContractError("synth_linear_problem needs m >= 1");
  Matrix gamma(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      gamma(i, j) = 0.1 * std::ldexp(1.0, -static_cast<int>(std::min<Index>(std::abs(i - j), 2000)));
    }
  }
  LinearModel model(Vector::Constant(m, 1.0 / static_cast<double>(m)), CenteringTransform::identity(m));
  return {std::move(model), GaussianInput(Vector::Constant(m, 0.5), std::move(gamma))};
}

double bachstein(double x) { return 2.0 * (x / 10.0 + std::sin(4.0 * x / 10.0) + std::sin(13.0 * x / 10.0)); }

bool bachstein_in_domain(double x) { return x >= -5.0 && x <= 5.0; }

RegressionData gen_bachstein_dataset(Index n, double sigma, std::uint64_t seed) {
  if (n < 1) throw ContractError("gen_bachstein_dataset needs n >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ContractError("gen_bachstein_dataset noise sigma must be >= 0");
  rng::Stream xs(seed, 0);
  rng::Stream noise(seed, 1);
  RegressionData data{Matrix(n, 1), Vector(n)};
  for (Index i = 0; i < n; ++i) {
    const double x = -5.0 + 10.0 * xs.uniform();
    data.x(i, 0) = x;
    data.y(i) = bachstein(x) + sigma * noise.normal();
  }
  return data;
}

std::string_view kind_name(Kind kind) { return kind == Kind::linear ? "linear" : "kernel"; }

Kind kind_from_name(std::string_view name) {
  if (name == "linear") return Kind::linear;
  if (name == "kernel") return Kind::kernel;
  throw ContractError("unknown benchmark kind '" + std::string(name) + "' (expected linear or kernel)");
}

std::string_view method_name(Method method) { return method == Method::analytical ? "analytical" : "mc"; }

Method method_from_name(std::string_view name) {
  if (name == "analytical") return Method::analytical;
  if (name == "mc") return Method::mc;
  throw ContractError("unknown benchmark method '" + std::string(name) + "'");
}

namespace {

volatile double g_sink = 0.0;

/// Process CPU time. Single-threaded measurements use it so that time the
/// scheduler hands to other processes is not billed to the call.
struct cpu_clock {
  using rep = std::int64_t;
  using period = std::nano;
  using duration = std::chrono::duration<rep, period>;
  using time_point = std::chrono::time_point<cpu_clock>;
  static constexpr bool is_steady = true;
  static time_point now() noexcept {
    timespec ts{};
    clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts);
    return time_point(duration(static_cast<rep>(ts.tv_sec) * 1000000000 + ts.tv_nsec));
  }
};

/// Seconds per call of `f`, repeating inside one measurement until the
/// elapsed time spans at least 20 clock ticks.
template <class Clock, class F>
double time_with(F&& f) {
  constexpr typename Clock::rep kMinTicks = 20;
  // Short calls are repeated for at least this long to average out scheduler noise.
  constexpr std::chrono::milliseconds kMinDuration{10};
  for (long inner = 1;; inner *= 2) {
    const auto start = Clock::now();
    for (long k = 0; k < inner; ++k) g_sink = g_sink + f();
    const auto elapsed = Clock::now() - start;
    if (elapsed.count() >= kMinTicks && elapsed >= kMinDuration) {
      return std::chrono::duration<double>(elapsed).count() / static_cast<double>(inner);
    }
  }
}

/// Wall-clock time once worker threads are involved, CPU time otherwise.
template <class F>
double time_call(F&& f, bool parallel) {
  return parallel ? time_with<std::chrono::steady_clock>(f) : time_with<cpu_clock>(f);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 == 1 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

void run_size(const Model& model, const InputDistribution& input, Index size, const Config& config, Report& report) {
  const int reps = size <= 1000 ? std::max(config.reps, 5) : config.reps;
  for (int rep = 0; rep < reps; ++rep) {
    const double s = time_call([&] { return propagate(model, input).variance; }, config.parallel);
    report.rows.push_back({Method::analytical, size, std::nullopt, rep, s});
  }
  if (config.mc_max_size > 0 && size > config.mc_max_size) return;
  const MCOptions options{config.parallel ? 0u : 1u};
  for (std::uint64_t t : config.mc_samples) {
    for (int rep = 0; rep < reps; ++rep) {
      const std::uint64_t seed = rng::derive_seed(config.seed, static_cast<std::uint64_t>(size),
                                                  static_cast<std::uint64_t>(rep));
      const double s = time_call([&] { return mc_propagate(model, input, t, seed, options).mean; }, config.parallel);
      report.rows.push_back({Method::mc, size, t, rep, s});
    }
  }
}

}  // namespace

Report run_scaling_benchmark(const Config& config) {
  if (config.sizes.empty()) throw ContractError("benchmark needs at least one size");
  if (!std::is_sorted(config.sizes.begin(), config.sizes.end())) throw ContractError("benchmark sizes must be ascending");
  if (config.sizes.front() < 1) throw ContractError("benchmark sizes must be positive");
  if (config.reps < 3) throw ContractError("benchmark needs reps >= 3");
  for (auto t : config.mc_samples) {
    if (t < 2) throw ContractError("benchmark Monte Carlo sample counts must be >= 2");
  }

  Report report{config.kind, config.slope_min_size, {}, {}};
  if (config.kind == Kind::linear) {
    for (Index m : config.sizes) {
      auto problem = synth_linear_problem(m);
      const Model model = std::move(problem.model);
      const InputDistribution input(std::move(problem.input));
      run_size(model, input, m, config, report);
    }
  } else {
    const Index n0 = config.sizes.front();
    const auto first = gen_bachstein_dataset(n0, 1.0, rng::derive_seed(config.seed, static_cast<std::uint64_t>(n0)));
    const auto hyper = optimize_hyperparameters(first.x, first.y);
    const InputDistribution input(GaussianInput(Vector::Constant(1, 0.5), Matrix::Constant(1, 1, 0.25)));
    for (Index n : config.sizes) {
      const auto data = gen_bachstein_dataset(n, 1.0, rng::derive_seed(config.seed, static_cast<std::uint64_t>(n)));
      const Model model = fit_gp(data.x, data.y, hyper.params, hyper.sigma2);
      run_size(model, input, n, config, report);
    }
  }
  report.slopes = fit_slopes(report.rows, config.slope_min_size);
  return report;
}

double fit_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw ContractError("fit_slope needs at least two points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [size, seconds] : points) {
    if (!(size > 0.0) || !(seconds > 0.0) || !std::isfinite(size) || !std::isfinite(seconds)) {
      throw ContractError("fit_slope needs positive finite sizes and times");
    }
    sx += std::log(size);
    sy += std::log(seconds);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [size, seconds] : points) {
    const double dx = std::log(size) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(seconds) - my);
  }
  if (sxx == 0.0) throw ContractError("fit_slope needs at least two distinct sizes");
  return sxy / sxx;
}

std::vector<Slope> fit_slopes(const std::vector<Row>& rows, Index slope_min_size) {
  using Key = std::pair<Method, std::uint64_t>;  // mc_samples 0 for analytical
  std::vector<Key> order;
  std::map<Key, std::map<Index, std::vector<double>>> series;
  for (const auto& row : rows) {
    const Key key{row.method, row.mc_samples.value_or(0)};
    if (!series.contains(key)) order.push_back(key);
    series[key][row.size].push_back(row.seconds);
  }
  std::vector<Slope> slopes;
  for (const auto& key : order) {
    const auto& by_size = series[key];
    std::vector<std::pair<double, double>> large, all;
    for (const auto& [size, times] : by_size) {
      const std::pair<double, double> point{static_cast<double>(size), median(times)};
      all.push_back(point);
      if (size >= slope_min_size) large.push_back(point);
    }
    const auto& points = large.size() >= 2 ? large : all;
    if (points.size() < 2) continue;
    std::optional<std::uint64_t> t;
    if (key.first == Method::mc) t = key.second;
    slopes.push_back({key.first, t, fit_slope(points)});
  }
  return slopes;
}

}  // namespace uqprop::bench
