#pragma once

#include "uqprop/bench.hpp"
#include "uqprop/distributions.hpp"
#include "uqprop/mc.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace uqprop::io {

using Json = nlohmann::ordered_json;

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

Json to_json(const LinearModel& model);
Json to_json(const KernelModel& model);
Json to_json(const Model& model);
/// Accepts {"type": "linear"} and {"type": "kernel_rbf"} documents.
Model model_from_json(const Json& json);

/// {"type": "gaussian", "mu": [...], "gamma": [[...]]} or
/// {"type": "independent", "components": [{"family": "uniform", "a", "b"},
/// {"family": "triangular", "a", "b"}, {"family": "normal", "mean", "variance"}]}.
Json to_json(const InputDistribution& distribution);
InputDistribution distribution_from_json(const Json& json);

Json to_json(const bench::Report& report);
bench::Report report_from_json(const Json& json);
/// method,size,mc_samples,rep,seconds
std::string report_csv(const bench::Report& report);
/// Median seconds per size, one gnuplot index block per series.
std::string report_plot_data(const bench::Report& report);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace uqprop::io
