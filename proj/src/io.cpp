#include "uqprop/io.hpp"

#include "uqprop/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace uqprop::io {

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

namespace {

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json matrix_json(const Matrix& a) {
  Json out = Json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

const Json& field(const Json& json, const char* key, const char* what) {
  if (!json.is_object()) throw ContractError(std::string(what) + ": expected a JSON object");
  const auto it = json.find(key);
  if (it == json.end()) throw ContractError(std::string(what) + ": missing field '" + key + "'");
  return *it;
}

double number(const Json& json, const char* key, const char* what) {
  const auto& v = field(json, key, what);
  if (!v.is_number()) throw ContractError(std::string(what) + ": field '" + key + "' must be a number");
  return v.get<double>();
}

std::string text(const Json& json, const char* key, const char* what) {
  const auto& v = field(json, key, what);
  if (!v.is_string()) throw ContractError(std::string(what) + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

Vector vector_from(const Json& json, const char* key, const char* what) {
  const auto& v = field(json, key, what);
  if (!v.is_array()) throw ContractError(std::string(what) + ": field '" + key + "' must be an array");
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ContractError(std::string(what) + ": '" + key + "' entries must be numbers");
    out(static_cast<Index>(i)) = v[i].get<double>();
  }
  return out;
}

Matrix matrix_from(const Json& json, const char* key, const char* what) {
  const auto& v = field(json, key, what);
  if (!v.is_array()) throw ContractError(std::string(what) + ": field '" + key + "' must be an array of rows");
  const Index rows = static_cast<Index>(v.size());
  const Index cols = rows == 0 ? 0 : static_cast<Index>(v[0].is_array() ? v[0].size() : 0);
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ContractError(std::string(what) + ": '" + key + "' rows must be arrays of equal length");
    }
    for (Index j = 0; j < cols; ++j) {
      const auto& x = row[static_cast<std::size_t>(j)];
      if (!x.is_number()) throw ContractError(std::string(what) + ": '" + key + "' entries must be numbers");
      out(i, j) = x.get<double>();
    }
  }
  return out;
}

void put_centering(Json& out, const CenteringTransform& c) {
  out["x_mean"] = vector_json(c.x_mean());
  out["x_scale"] = vector_json(c.x_scale());
  out["y_mean"] = c.y_mean();
}

CenteringTransform centering_from(const Json& json, const char* what) {
  return CenteringTransform(vector_from(json, "x_mean", what), vector_from(json, "x_scale", what),
                            number(json, "y_mean", what));
}

Json family_json(const UnivariateFamily& family) {
  Json out;
  out["family"] = std::string(family_name(family));
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Normal>) {
          out["mean"] = f.mean();
          out["variance"] = f.variance();
        } else {
          out["a"] = f.lower();
          out["b"] = f.upper();
        }
      },
      family);
  return out;
}

UnivariateFamily family_from(const Json& json) {
  constexpr const char* what = "distribution component";
  const auto name = text(json, "family", what);
  if (name == "uniform") return Uniform(number(json, "a", what), number(json, "b", what));
  if (name == "triangular") return Triangular(number(json, "a", what), number(json, "b", what));
  if (name == "normal") return Normal(number(json, "mean", what), number(json, "variance", what));
  throw UnsupportedError("unsupported distribution family '" + name + "' (expected uniform, triangular or normal)");
}

}  // namespace

Json to_json(const LinearModel& model) {
  Json out;
  out["type"] = "linear";
  out["beta"] = vector_json(model.beta());
  put_centering(out, model.centering());
  return out;
}

Json to_json(const KernelModel& model) {
  Json out;
  out["type"] = "kernel_rbf";
  out["provenance"] = std::string(provenance_name(model.provenance()));
  out["lambdas"] = vector_json(model.params().lambdas());
  out["sigma2"] = model.sigma2();
  out["alpha"] = vector_json(model.alpha());
  out["train_x"] = matrix_json(model.train_x());
  put_centering(out, model.centering());
  return out;
}

Json to_json(const Model& model) {
  return std::visit([](const auto& m) { return to_json(m); }, model);
}

Model model_from_json(const Json& json) {
  constexpr const char* what = "model file";
  const auto type = text(json, "type", what);
  if (type == "linear") return LinearModel(vector_from(json, "beta", what), centering_from(json, what));
  if (type == "kernel_rbf") {
    const auto provenance = provenance_from_name(text(json, "provenance", what));
    return KernelModel(vector_from(json, "alpha", what), matrix_from(json, "train_x", what),
                       RbfParams(vector_from(json, "lambdas", what)), number(json, "sigma2", what),
                       centering_from(json, what), provenance);
  }
  throw UnsupportedError("unsupported model type '" + type + "' (expected linear or kernel_rbf)");
}

Json to_json(const InputDistribution& distribution) {
  Json out;
  if (distribution.is_gaussian()) {
    out["type"] = "gaussian";
    out["mu"] = vector_json(distribution.gaussian().mean());
    out["gamma"] = matrix_json(distribution.gaussian().covariance());
  } else {
    out["type"] = "independent";
    Json components = Json::array();
    for (const auto& c : distribution.independent().components()) components.push_back(family_json(c));
    out["components"] = std::move(components);
  }
  return out;
}

InputDistribution distribution_from_json(const Json& json) {
  constexpr const char* what = "distribution descriptor";
  const auto type = text(json, "type", what);
  if (type == "gaussian") {
    Vector mu = vector_from(json, "mu", what);
    Matrix gamma = matrix_from(json, "gamma", what);
    if (gamma.rows() != gamma.cols()) throw DimensionMismatch("gaussian gamma columns", gamma.rows(), gamma.cols());
    return GaussianInput(std::move(mu), std::move(gamma));
  }
  if (type == "independent") {
    const auto& comps = field(json, "components", what);
    if (!comps.is_array()) throw ContractError("distribution descriptor: 'components' must be an array");
    std::vector<UnivariateFamily> families;
    for (const auto& c : comps) families.push_back(family_from(c));
    return IndependentInput(std::move(families));
  }
  throw UnsupportedError("unsupported distribution type '" + type + "' (expected gaussian or independent)");
}

namespace {

Json optional_samples(const std::optional<std::uint64_t>& t) { return t ? Json(*t) : Json(nullptr); }

std::optional<std::uint64_t> samples_from(const Json& json) {
  const auto& v = field(json, "mc_samples", "benchmark report");
  if (v.is_null()) return std::nullopt;
  if (!v.is_number_unsigned()) throw ContractError("benchmark report: mc_samples must be a non-negative integer");
  return v.get<std::uint64_t>();
}

}  // namespace

Json to_json(const bench::Report& report) {
  Json out;
  out["kind"] = std::string(bench::kind_name(report.kind));
  out["slope_min_size"] = report.slope_min_size;
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    Json row;
    row["method"] = std::string(bench::method_name(r.method));
    row["size"] = r.size;
    row["mc_samples"] = optional_samples(r.mc_samples);
    row["rep"] = r.rep;
    row["seconds"] = r.seconds;
    rows.push_back(std::move(row));
  }
  out["rows"] = std::move(rows);
  Json slopes = Json::array();
  for (const auto& s : report.slopes) {
    Json slope;
    slope["method"] = std::string(bench::method_name(s.method));
    slope["mc_samples"] = optional_samples(s.mc_samples);
    slope["slope"] = s.slope;
    slopes.push_back(std::move(slope));
  }
  out["slopes"] = std::move(slopes);
  return out;
}

bench::Report report_from_json(const Json& json) {
  constexpr const char* what = "benchmark report";
  bench::Report report{bench::kind_from_name(text(json, "kind", what)),
                       static_cast<Index>(number(json, "slope_min_size", what)), {}, {}};
  for (const auto& r : field(json, "rows", what)) {
    report.rows.push_back({bench::method_from_name(text(r, "method", what)), static_cast<Index>(number(r, "size", what)),
                           samples_from(r), static_cast<int>(number(r, "rep", what)), number(r, "seconds", what)});
  }
  for (const auto& s : field(json, "slopes", what)) {
    report.slopes.push_back({bench::method_from_name(text(s, "method", what)), samples_from(s), number(s, "slope", what)});
  }
  return report;
}

std::string report_csv(const bench::Report& report) {
  std::ostringstream os;
  os << "method,size,mc_samples,rep,seconds\n";
  for (const auto& r : report.rows) {
    os << bench::method_name(r.method) << ',' << r.size << ',';
    if (r.mc_samples) os << *r.mc_samples;
    os << ',' << r.rep << ',' << format_double(r.seconds) << '\n';
  }
  return os.str();
}

std::string report_plot_data(const bench::Report& report) {
  // Recompute medians in the same grouping as the slope fit.
  std::vector<std::pair<bench::Method, std::optional<std::uint64_t>>> order;
  for (const auto& r : report.rows) {
    const std::pair key{r.method, r.mc_samples};
    if (std::find(order.begin(), order.end(), key) == order.end()) order.push_back(key);
  }
  std::ostringstream os;
  os << "# " << bench::kind_name(report.kind) << " propagation timing; columns: size median_seconds\n";
  bool first = true;
  for (const auto& [method, t] : order) {
    if (!first) os << "\n\n";
    first = false;
    os << "# " << bench::method_name(method);
    if (t) os << " T=" << *t;
    os << '\n';
    std::vector<Index> sizes;
    for (const auto& r : report.rows) {
      if (r.method == method && r.mc_samples == t && std::find(sizes.begin(), sizes.end(), r.size) == sizes.end()) {
        sizes.push_back(r.size);
      }
    }
    for (Index size : sizes) {
      std::vector<double> times;
      for (const auto& r : report.rows) {
        if (r.method == method && r.mc_samples == t && r.size == size) times.push_back(r.seconds);
      }
      std::sort(times.begin(), times.end());
      const std::size_t k = times.size() / 2;
      const double med = times.size() % 2 == 1 ? times[k] : 0.5 * (times[k - 1] + times[k]);
      os << size << ' ' << format_double(med) << '\n';
    }
  }
  return os.str();
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ContractError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ContractError("failed writing '" + path.string() + "'");
}

}  // namespace uqprop::io
