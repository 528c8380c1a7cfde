#include "uqprop/quadrature.hpp"

#include "uqprop/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace uqprop {

namespace {

struct Support {
  double lower;
  double upper;
  std::vector<double> kinks;
};

// Normal weights are truncated at ±12 sd, where the neglected mass is below 1e-32.
Support support_of(const UnivariateFamily& weight) {
  if (const auto* u = std::get_if<Uniform>(&weight)) return {u->lower(), u->upper(), {}};
  if (const auto* t = std::get_if<Triangular>(&weight)) return {t->lower(), t->upper(), {t->mean()}};
  const auto& n = std::get<Normal>(weight);
  const double sd = std::sqrt(n.variance());
  Support s{n.mean() - 12.0 * sd, n.mean() + 12.0 * sd, {n.mean()}};
  for (double k : {1.0, 2.0, 4.0, 8.0}) {
    s.kinks.push_back(n.mean() - k * sd);
    s.kinks.push_back(n.mean() + k * sd);
  }
  return s;
}

double pdf(const UnivariateFamily& weight, double x) {
  if (const auto* u = std::get_if<Uniform>(&weight)) {
    return (x >= u->lower() && x <= u->upper()) ? 1.0 / (u->upper() - u->lower()) : 0.0;
  }
  if (const auto* t = std::get_if<Triangular>(&weight)) {
    const double a = t->lower();
    const double b = t->upper();
    const double w2 = (b - a) * (b - a);
    if (x < a || x > b) return 0.0;
    return x <= t->mean() ? 4.0 * (x - a) / w2 : 4.0 * (b - x) / w2;
  }
  const auto& n = std::get<Normal>(weight);
  const double z = (x - n.mean()) / std::sqrt(n.variance());
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi * n.variance());
}

struct Piece {
  double value;
  double error;
};

// Bisection on the Kronrod error estimate with an absolute budget split
// evenly between halves.
template <class F>
Piece adaptive(const F& f, double a, double b, double tolerance, int depth) {
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &error);
  // Boost reports the estimate on the reference interval [-1, 1].
  error *= 0.5 * (b - a);
  // The Kronrod estimate bottoms out near a few hundred ulps of the value;
  // splitting below that floor only accumulates floors.
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * std::abs(value);
  if (error <= std::max(tolerance, floor) || depth == 0) return {value, error};
  const double m = 0.5 * (a + b);
  const Piece left = adaptive(f, a, m, 0.5 * tolerance, depth - 1);
  const Piece right = adaptive(f, m, b, 0.5 * tolerance, depth - 1);
  return {left.value + right.value, left.error + right.error};
}

}  // namespace

double quadrature_reference(const UnivariateFamily& weight, std::span<const double> centers, double lambda,
                            double absolute_tolerance) {
  if (!std::isfinite(lambda) || !(lambda > 0.0)) throw ContractError("quadrature_reference: lambda must be > 0");
  const Support support = support_of(weight);

  std::vector<double> breaks{support.lower, support.upper};
  for (double k : support.kinks) breaks.push_back(k);
  for (double c : centers) {
    if (!std::isfinite(c)) throw ContractError("quadrature_reference: centers must be finite");
    breaks.push_back(c);
  }
  if (!centers.empty()) {
    // The kernel product is a Gaussian bump; split on its own length scale
    // so that every piece is resolved by the first few Kronrod refinements.
    double peak = 0.0;
    for (double c : centers) peak += c;
    peak /= static_cast<double>(centers.size());
    const double width = lambda / std::sqrt(static_cast<double>(centers.size()));
    breaks.push_back(peak);
    for (double k : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
      breaks.push_back(peak - k * width);
      breaks.push_back(peak + k * width);
    }
  }
  std::erase_if(breaks, [&](double x) { return x < support.lower || x > support.upper; });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  const double inv2l2 = 1.0 / (2.0 * lambda * lambda);
  auto integrand = [&](double x) {
    double exponent = 0.0;
    for (double c : centers) exponent -= (x - c) * (x - c) * inv2l2;
    return pdf(weight, x) * std::exp(exponent);
  };

  double total = 0.0;
  double total_error = 0.0;
  const double piece_tolerance = 0.1 * absolute_tolerance / static_cast<double>(breaks.size());
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const auto piece = adaptive(integrand, breaks[k], breaks[k + 1], piece_tolerance, 20);
    total += piece.value;
    total_error += piece.error;
  }
  if (!(total_error <= absolute_tolerance)) {
    std::ostringstream os;
    os << "quadrature_reference did not converge: error estimate " << total_error << " exceeds "
       << absolute_tolerance;
    throw OracleFailure(os.str());
  }
  return total;
}

}  // namespace uqprop
