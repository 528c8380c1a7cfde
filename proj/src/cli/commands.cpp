#include "uqprop/cli/commands.hpp"

#include "uqprop/cli/dataset.hpp"
#include "uqprop/errors.hpp"
#include "uqprop/io.hpp"
#include "uqprop/kernel_models.hpp"
#include "uqprop/mc.hpp"
#include "uqprop/parallel.hpp"
#include "uqprop/rng.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <iostream>
#include <sstream>

namespace uqprop::cli {

namespace {

using io::Json;

std::string num(double v) { return io::format_double(v); }

void emit(const std::optional<std::filesystem::path>& path, const std::string& text, std::ostream& out) {
  if (path) {
    io::write_text_file(*path, text);
  } else {
    out << text;
  }
}

std::string dump(const Json& json) { return json.dump(2) + "\n"; }

/// Runs `task` for every index on the worker pool; if several indices fail,
/// the error from the lowest one is reported so messages do not depend on
/// scheduling.
void for_each_point(std::size_t count, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> failures(count);
  parallel::for_each_index(count, parallel::default_thread_count(), [&](std::size_t i) {
    try {
      task(i);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  });
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

std::vector<InputDistribution> load_distributions(const PropagateConfig& config, Index model_dimension) {
  const Json json = io::read_json_file(config.dist);
  std::optional<Dataset> points;
  if (config.data) points = ingest_csv(*config.data, config.target);

  std::vector<InputDistribution> out;
  if (json.is_array()) {
    for (const auto& d : json) out.push_back(io::distribution_from_json(d));
    if (points && static_cast<Index>(out.size()) != points->rows()) {
      throw DimensionMismatch("distribution descriptors vs data rows", points->rows(), static_cast<long>(out.size()));
    }
  } else if (points) {
    if (points->features.cols() != model_dimension) {
      throw DimensionMismatch("data columns vs model input dimension", model_dimension, points->features.cols());
    }
    const bool shared_gamma = json.is_object() && json.value("type", "") == "gaussian" && !json.contains("mu");
    if (shared_gamma) {
      Json full = json;
      full["mu"] = Json::array();
      for (Index j = 0; j < model_dimension; ++j) full["mu"].push_back(0.0);
      const auto tmpl = io::distribution_from_json(full);
      if (tmpl.dimension() != model_dimension) {
        throw DimensionMismatch("distribution vs model input dimension", model_dimension, tmpl.dimension());
      }
      for (Index i = 0; i < points->rows(); ++i) {
        out.push_back(GaussianInput(points->features.row(i).transpose(), tmpl.gaussian().covariance()));
      }
    } else {
      const auto tmpl = io::distribution_from_json(json);
      if (tmpl.dimension() != model_dimension) {
        throw DimensionMismatch("distribution vs model input dimension", model_dimension, tmpl.dimension());
      }
      for (Index i = 0; i < points->rows(); ++i) out.push_back(recentered(tmpl, points->features.row(i).transpose()));
    }
  } else {
    out.push_back(io::distribution_from_json(json));
  }
  for (const auto& d : out) {
    if (d.dimension() != model_dimension) {
      throw DimensionMismatch("distribution vs model input dimension", model_dimension, d.dimension());
    }
  }
  return out;
}

struct Inputs {
  Model model;
  std::vector<InputDistribution> distributions;
};

Inputs load_inputs(const PropagateConfig& config) {
  Model model = io::model_from_json(io::read_json_file(config.model));
  auto distributions = load_distributions(config, input_dimension(model));
  return {std::move(model), std::move(distributions)};
}

std::vector<Moments> propagate_all(const Inputs& inputs) {
  std::vector<Moments> result(inputs.distributions.size());
  for_each_point(result.size(), [&](std::size_t i) { result[i] = propagate(inputs.model, inputs.distributions[i]); });
  return result;
}

std::string family_label(OutputFamily f) { return f == OutputFamily::gaussian ? "gaussian" : "unspecified"; }

std::string model_type(const Model& model) {
  return std::holds_alternative<LinearModel>(model) ? "linear" : "kernel_rbf";
}

double rmse(const Vector& a, const Vector& b) {
  if (a.size() == 0) return 0.0;
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

std::vector<Index> permutation(Index n, std::uint64_t seed) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  rng::Stream stream(seed, 0);
  for (Index i = n - 1; i > 0; --i) {
    const Index j = std::min<Index>(i, static_cast<Index>(stream.uniform() * static_cast<double>(i + 1)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return idx;
}

Model fit_model(const FitConfig& config, const Dataset& train, std::ostream& out) {
  const Matrix& x = train.features;
  const Vector& y = train.target;
  const std::string& kind = config.model;
  if (kind == "ols") return fit_ols(x, y, {config.standardization});
  if (kind == "ridge") {
    if (!config.sigma2) throw ContractError("ridge needs --sigma2");
    return fit_ridge(x, y, *config.sigma2, {config.standardization});
  }
  if (kind != "kernel_ridge" && kind != "gp") {
    throw ContractError("unknown model '" + kind + "' (expected ols, ridge, kernel_ridge or gp)");
  }
  const Index m = x.cols();
  std::optional<RbfParams> params;
  double sigma2 = 0.0;
  if (config.optimize_hyperparams) {
    HyperparameterOptions options;
    options.standardization = config.standardization;
    const auto h = optimize_hyperparameters(x, y, options);
    params = h.params;
    sigma2 = h.sigma2;
    out << "log_marginal_likelihood=" << num(h.log_marginal_likelihood) << '\n';
  } else {
    if (config.lambda.empty() || !config.sigma2) {
      throw ContractError(kind + " needs --lambda and --sigma2, or --optimize-hyperparams");
    }
    if (config.lambda.size() == 1) {
      params = RbfParams::isotropic(config.lambda[0], m);
    } else {
      if (static_cast<Index>(config.lambda.size()) != m) {
        throw DimensionMismatch("--lambda values vs feature columns", m, static_cast<long>(config.lambda.size()));
      }
      params = RbfParams(Eigen::Map<const Vector>(config.lambda.data(), m));
    }
    sigma2 = *config.sigma2;
  }
  out << "lambda=";
  for (Index j = 0; j < params->lambdas().size(); ++j) out << (j ? "," : "") << num(params->lambdas()(j));
  out << "\nsigma2=" << num(sigma2) << '\n';
  if (kind == "gp") return fit_gp(x, y, *params, sigma2, config.standardization);
  return fit_kernel_ridge(x, y, *params, sigma2, {config.standardization, Provenance::ridge});
}

Vector predict_all(const Model& model, const Matrix& x) {
  return std::visit([&](const auto& m) { return predict_rows(m, x); }, model);
}

}  // namespace

int cmd_fit(const FitConfig& config, std::ostream& out) {
  if (config.target.empty()) throw ContractError("fit needs --target");
  const Dataset data = ingest_csv(config.data, config.target);
  Dataset train = data;
  std::optional<Dataset> holdout;
  if (config.split) {
    const double f = *config.split;
    if (!(f > 0.0 && f < 1.0)) throw ContractError("--split must lie in (0, 1)");
    const Index n = data.rows();
    const Index n_train = static_cast<Index>(std::llround(f * static_cast<double>(n)));
    if (n_train < 1 || n_train >= n) throw ContractError("--split leaves an empty training or holdout set");
    const auto perm = permutation(n, config.seed);
    train = select_rows(data, {perm.begin(), perm.begin() + n_train});
    holdout = select_rows(data, {perm.begin() + n_train, perm.end()});
  }

  Model model = [&] {
    try {
      return fit_model(config, train, out);
    } catch (const ContractError& e) {
      throw ContractError(std::string("fit: ") + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError(std::string("fit: ") + e.what());
    }
  }();
  io::write_text_file(config.out, dump(io::to_json(model)));
  out << "train_rmse=" << num(rmse(predict_all(model, train.features), train.target)) << '\n';

  if (holdout) {
    Index dropped = 0;
    if (config.drop_extrapolation) {
      const Vector lo = train.features.colwise().minCoeff().transpose();
      const Vector hi = train.features.colwise().maxCoeff().transpose();
      const double ylo = train.target.minCoeff(), yhi = train.target.maxCoeff();
      std::vector<Index> keep;
      for (Index i = 0; i < holdout->rows(); ++i) {
        const auto row = holdout->features.row(i).transpose();
        const bool inside = (row.array() >= lo.array()).all() && (row.array() <= hi.array()).all() &&
                            holdout->target(i) >= ylo && holdout->target(i) <= yhi;
        if (inside) keep.push_back(i);
      }
      dropped = holdout->rows() - static_cast<Index>(keep.size());
      holdout = select_rows(*holdout, keep);
    }
    out << "holdout_points=" << holdout->rows() << "\ndropped=" << dropped << '\n';
    if (holdout->rows() > 0) {
      out << "holdout_rmse=" << num(rmse(predict_all(model, holdout->features), holdout->target)) << '\n';
    }
    if (config.holdout_out) write_csv(*config.holdout_out, *holdout);
  }
  return 0;
}

int cmd_propagate(const PropagateConfig& config, std::ostream& out) {
  const Inputs inputs = load_inputs(config);
  const auto results = propagate_all(inputs);
  std::ostringstream os;
  if (config.format == Format::csv) {
    os << "index,mean,variance,family\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      os << i << ',' << num(results[i].mean) << ',' << num(results[i].variance) << ','
         << family_label(results[i].family) << '\n';
    }
  } else {
    Json json;
    json["command"] = "propagate";
    json["model_type"] = model_type(inputs.model);
    Json points = Json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      Json p;
      p["index"] = i;
      p["mean"] = results[i].mean;
      p["variance"] = results[i].variance;
      p["family"] = family_label(results[i].family);
      points.push_back(std::move(p));
    }
    json["points"] = std::move(points);
    os << dump(json);
  }
  emit(config.out, os.str(), out);
  return 0;
}

namespace {

std::vector<MCEstimate> mc_all(const Inputs& inputs, std::uint64_t samples, std::uint64_t seed) {
  std::vector<MCEstimate> result(inputs.distributions.size());
  for_each_point(result.size(), [&](std::size_t i) {
    result[i] = mc_propagate(inputs.model, inputs.distributions[i], samples, rng::derive_seed(seed, i), {1});
  });
  return result;
}

}  // namespace

int cmd_validate(const ValidateConfig& config, std::ostream& out) {
  if (config.samples.empty()) throw ContractError("validate needs at least one --samples value");
  const Inputs inputs = load_inputs(config.inputs);
  const auto analytical = propagate_all(inputs);

  struct Row {
    std::uint64_t samples;
    Kappa kappa;
    double rms_se_mean;
    double rms_se_variance;
  };
  std::vector<Row> rows;
  for (std::uint64_t t : config.samples) {
    std::vector<MCEstimate> mc;
    if (t == 0) {
      // Analytical-vs-analytical bypass.
      for (const auto& a : analytical) mc.push_back({a.mean, a.variance, 0.0, 0.0, 0, config.seed});
    } else {
      mc = mc_all(inputs, t, config.seed);
    }
    double se_m = 0.0, se_v = 0.0;
    for (const auto& e : mc) {
      se_m += e.se_mean * e.se_mean;
      se_v += e.se_variance * e.se_variance;
    }
    const double n = static_cast<double>(mc.size());
    rows.push_back({t, kappa_rmse(analytical, mc), std::sqrt(se_m / n), std::sqrt(se_v / n)});
  }

  std::ostringstream table;
  table << "# seed=" << config.seed << " points=" << analytical.size() << '\n';
  table << "samples kappa_mean kappa_variance rms_se_mean rms_se_variance\n";
  for (const auto& r : rows) {
    table << r.samples << ' ' << num(r.kappa.mean) << ' ' << num(r.kappa.variance) << ' ' << num(r.rms_se_mean) << ' '
          << num(r.rms_se_variance) << '\n';
  }

  std::ostringstream os;
  if (config.inputs.format == Format::csv) {
    os << "seed,samples,kappa_mean,kappa_variance,rms_se_mean,rms_se_variance\n";
    for (const auto& r : rows) {
      os << config.seed << ',' << r.samples << ',' << num(r.kappa.mean) << ',' << num(r.kappa.variance) << ','
         << num(r.rms_se_mean) << ',' << num(r.rms_se_variance) << '\n';
    }
  } else {
    Json json;
    json["command"] = "validate";
    json["seed"] = config.seed;
    json["points"] = analytical.size();
    Json jrows = Json::array();
    for (const auto& r : rows) {
      Json j;
      j["samples"] = r.samples;
      j["kappa_mean"] = r.kappa.mean;
      j["kappa_variance"] = r.kappa.variance;
      j["rms_se_mean"] = r.rms_se_mean;
      j["rms_se_variance"] = r.rms_se_variance;
      jrows.push_back(std::move(j));
    }
    json["rows"] = std::move(jrows);
    os << dump(json);
  }
  if (config.inputs.out) {
    io::write_text_file(*config.inputs.out, os.str());
    out << table.str();
  } else {
    out << os.str();
  }
  return 0;
}

int cmd_mc(const McConfig& config, std::ostream& out) {
  const Inputs inputs = load_inputs(config.inputs);
  const auto results = mc_all(inputs, config.samples, config.seed);
  std::ostringstream os;
  if (config.inputs.format == Format::csv) {
    os << "index,mean,variance,se_mean,se_variance,samples,seed\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      os << i << ',' << num(r.mean) << ',' << num(r.variance) << ',' << num(r.se_mean) << ',' << num(r.se_variance)
         << ',' << r.samples << ',' << r.seed << '\n';
    }
  } else {
    Json json;
    json["command"] = "mc";
    json["seed"] = config.seed;
    json["samples"] = config.samples;
    Json points = Json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      Json p;
      p["index"] = i;
      p["mean"] = r.mean;
      p["variance"] = r.variance;
      p["se_mean"] = r.se_mean;
      p["se_variance"] = r.se_variance;
      p["point_seed"] = r.seed;
      points.push_back(std::move(p));
    }
    json["points"] = std::move(points);
    os << dump(json);
  }
  emit(config.inputs.out, os.str(), out);
  return 0;
}

int cmd_bench(const BenchCliConfig& config, std::ostream& out) {
  if (config.out.empty()) throw ContractError("bench needs --out");
  const auto report = bench::run_scaling_benchmark(config.bench);
  const std::string prefix = config.out.string();
  io::write_text_file(prefix + ".csv", io::report_csv(report));
  io::write_text_file(prefix + ".json", dump(io::to_json(report)));
  io::write_text_file(prefix + ".plot.dat", io::report_plot_data(report));
  for (const auto& s : report.slopes) {
    out << "slope " << bench::method_name(s.method);
    if (s.mc_samples) out << " T=" << *s.mc_samples;
    out << ' ' << num(s.slope) << '\n';
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analytical uncertainty propagation through regression models"};
  app.require_subcommand(1);

  const std::map<std::string, Format> formats{{"csv", Format::csv}, {"json", Format::json}};
  const std::map<std::string, Standardization> standardizations{{"none", Standardization::none},
                                                                {"center", Standardization::center},
                                                                {"center_and_scale", Standardization::center_and_scale}};

  FitConfig fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a regression model and write it as JSON");
  fit_cmd->add_option("--data", fit.data, "Training CSV")->required();
  fit_cmd->add_option("--target", fit.target, "Target column name")->required();
  fit_cmd->add_option("--model", fit.model, "ols, ridge, kernel_ridge or gp")->required();
  fit_cmd->add_option("--sigma2", fit.sigma2, "Regularisation / noise variance");
  fit_cmd->add_option("--lambda", fit.lambda, "RBF length scale(s)");
  fit_cmd->add_flag("--optimize-hyperparams", fit.optimize_hyperparams, "Maximise the marginal likelihood");
  fit_cmd->add_option("--split", fit.split, "Training fraction; the rest is held out");
  fit_cmd->add_flag("--drop-extrapolation", fit.drop_extrapolation, "Drop holdout rows outside the training box");
  fit_cmd->add_option("--seed", fit.seed, "Seed for the holdout split");
  fit_cmd->add_option("--out", fit.out, "Model JSON path")->required();
  fit_cmd->add_option("--holdout-out", fit.holdout_out, "Write the holdout rows as CSV");
  fit_cmd->add_option("--standardization", fit.standardization, "none, center or center_and_scale")
      ->transform(CLI::CheckedTransformer(standardizations));

  auto add_inputs = [&](CLI::App* cmd, PropagateConfig& c) {
    cmd->add_option("--model", c.model, "Model JSON")->required();
    cmd->add_option("--dist", c.dist, "Distribution descriptor JSON")->required();
    cmd->add_option("--data", c.data, "Test points CSV");
    cmd->add_option("--target", c.target, "Column of --data to ignore");
    cmd->add_option("--out", c.out, "Output path (stdout when omitted)");
    cmd->add_option("--format", c.format, "csv or json")->transform(CLI::CheckedTransformer(formats));
  };

  PropagateConfig prop;
  auto* prop_cmd = app.add_subcommand("propagate", "Analytical output mean and variance per test point");
  add_inputs(prop_cmd, prop);

  ValidateConfig val;
  auto* val_cmd = app.add_subcommand("validate", "Compare analytical moments with Monte Carlo (kappa table)");
  add_inputs(val_cmd, val.inputs);
  val_cmd->add_option("--samples", val.samples, "Monte Carlo sample counts (0 compares analytical with itself)");
  val_cmd->add_option("--seed", val.seed, "Base seed");

  McConfig mc;
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo output moments per test point");
  add_inputs(mc_cmd, mc.inputs);
  mc_cmd->add_option("--samples", mc.samples, "Monte Carlo sample count")->check(CLI::Range(2ull, ~0ull));
  mc_cmd->add_option("--seed", mc.seed, "Base seed");

  BenchCliConfig bench_cfg;
  std::string kind = "linear";
  std::optional<Index> mc_max_size;
  auto* bench_cmd = app.add_subcommand("bench", "Scaling benchmark of analytical and Monte Carlo propagation");
  bench_cmd->add_option("--kind", kind, "linear or kernel")->check(CLI::IsMember({"linear", "kernel"}));
  bench_cmd->add_option("--sizes", bench_cfg.bench.sizes, "Ascending problem sizes");
  bench_cmd->add_option("--mc-samples", bench_cfg.bench.mc_samples, "Monte Carlo sample counts");
  bench_cmd->add_option("--reps", bench_cfg.bench.reps, "Repetitions per measurement (>= 3)");
  bench_cmd->add_option("--seed", bench_cfg.bench.seed, "Seed for synthetic data and Monte Carlo");
  bench_cmd->add_option("--slope-min-size", bench_cfg.bench.slope_min_size, "Smallest size entering the slope fit");
  bench_cmd->add_option("--mc-max-size", mc_max_size,
                        "Skip Monte Carlo above this size (0 = never; default 3163 for linear, 0 for kernel)");
  bench_cmd->add_flag("--parallel", bench_cfg.bench.parallel, "Let Monte Carlo use worker threads");
  bench_cmd->add_option("--out", bench_cfg.out, "Output prefix")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit, out);
    if (*prop_cmd) return cmd_propagate(prop, out);
    if (*val_cmd) return cmd_validate(val, out);
    if (*mc_cmd) return cmd_mc(mc, out);
    if (*bench_cmd) {
      bench_cfg.bench.kind = bench::kind_from_name(kind);
      bench_cfg.bench.mc_max_size = mc_max_size.value_or(bench_cfg.bench.kind == bench::Kind::linear ? 3163 : 0);
      return cmd_bench(bench_cfg, out);
    }
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace uqprop::cli
