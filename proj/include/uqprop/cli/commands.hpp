#pragma once

#include "uqprop/bench.hpp"
#include "uqprop/centering.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace uqprop::cli {

enum class Format { csv, json };

struct FitConfig {
  std::filesystem::path data;
  std::string target;
  std::string model;  // ols, ridge, kernel_ridge, gp
  std::optional<double> sigma2;
  std::vector<double> lambda;  // one value (isotropic) or one per feature
  bool optimize_hyperparams = false;
  std::optional<double> split;  // training fraction in (0, 1)
  bool drop_extrapolation = false;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  std::optional<std::filesystem::path> holdout_out;
  Standardization standardization = Standardization::center_and_scale;
};

struct PropagateConfig {
  std::filesystem::path model;
  std::filesystem::path dist;
  /// Test points; a single descriptor in `dist` is then recentred at every row.
  std::optional<std::filesystem::path> data;
  std::string target;  // column of `data` to ignore
  std::optional<std::filesystem::path> out;  // stdout when absent
  Format format = Format::json;
};

struct ValidateConfig {
  PropagateConfig inputs;
  std::vector<std::uint64_t> samples = {1000, 10000, 100000, 1000000};
  std::uint64_t seed = 0;
};

struct McConfig {
  PropagateConfig inputs;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
};

struct BenchCliConfig {
  bench::Config bench;
  std::filesystem::path out;  // prefix for .csv, .json and .plot.dat
};

/// Each command writes its primary output and returns the process exit code.
int cmd_fit(const FitConfig& config, std::ostream& out);
int cmd_propagate(const PropagateConfig& config, std::ostream& out);
int cmd_validate(const ValidateConfig& config, std::ostream& out);
int cmd_mc(const McConfig& config, std::ostream& out);
int cmd_bench(const BenchCliConfig& config, std::ostream& out);

/// Parses arguments (without the program name) and dispatches. Library
/// errors are reported on `err`: exit 2 for usage and contract errors, 3 for
/// numerical failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uqprop::cli
