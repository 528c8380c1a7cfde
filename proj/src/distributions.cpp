#include "uqprop/distributions.hpp"

#include "uqprop/errors.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace uqprop {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void require_interval(double a, double b, const char* family) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    std::ostringstream os;
    os << family << " distribution requires finite a < b (got a=" << a << ", b=" << b << ")";
    throw ContractError(os.str());
  }
}

// Cholesky first since it is the cheap test for large m; semi-definite
// matrices (e.g. all zeros) fall through to the eigenvalue test.
bool covariance_is_psd(const Matrix& gamma) {
  if (gamma.rows() == 0) return true;
  if (Eigen::LLT<Matrix>(gamma).info() == Eigen::Success) return true;
  const double jitter = linalg::kJitterScale * gamma.trace() / static_cast<double>(gamma.rows());
  if (jitter > 0.0) {
    Matrix shifted = gamma;
    shifted.diagonal().array() += jitter;
    if (Eigen::LLT<Matrix>(shifted).info() == Eigen::Success) return true;
  }
  return linalg::is_positive_semidefinite(gamma);
}

}  // namespace

GaussianInput::GaussianInput(Vector mu, Matrix gamma) : mu_(std::move(mu)), gamma_(std::move(gamma)) {
  if (gamma_.rows() != gamma_.cols()) {
    throw DimensionMismatch("Gaussian input covariance must be square", gamma_.rows(), gamma_.cols());
  }
  if (gamma_.rows() != mu_.size()) {
    throw DimensionMismatch("Gaussian input covariance size vs mean length", mu_.size(), gamma_.rows());
  }
  if (!mu_.allFinite() || !gamma_.allFinite()) {
    throw ContractError("Gaussian input has non-finite entries");
  }
  if (!linalg::is_symmetric(gamma_, 1e-12)) {
    throw ContractError("Gaussian input covariance is not symmetric");
  }
  gamma_ = 0.5 * (gamma_ + gamma_.transpose()).eval();
  if (!covariance_is_psd(gamma_)) {
    throw ContractError("Gaussian input covariance is not positive semi-definite");
  }
}

Uniform::Uniform(double a, double b) : a_(a), b_(b) { require_interval(a, b, "uniform"); }

Triangular::Triangular(double a, double b) : a_(a), b_(b) { require_interval(a, b, "triangular"); }

Normal::Normal(double mean, double variance) : mean_(mean), variance_(variance) {
  if (!std::isfinite(mean) || !std::isfinite(variance) || !(variance > 0.0)) {
    std::ostringstream os;
    os << "normal distribution requires finite mean and variance > 0 (got variance=" << variance << ")";
    throw ContractError(os.str());
  }
}

double mean(const UnivariateFamily& family) {
  return std::visit([](const auto& f) { return f.mean(); }, family);
}

double variance(const UnivariateFamily& family) {
  return std::visit([](const auto& f) { return f.variance(); }, family);
}

std::string_view family_name(const UnivariateFamily& family) {
  return std::visit(Overloaded{[](const Uniform&) { return std::string_view("uniform"); },
                               [](const Triangular&) { return std::string_view("triangular"); },
                               [](const Normal&) { return std::string_view("normal"); }},
                    family);
}

IndependentInput::IndependentInput(std::vector<UnivariateFamily> components) : components_(std::move(components)) {
  if (components_.empty()) throw ContractError("independent input needs at least one component");
}

Index InputDistribution::dimension() const noexcept {
  return std::visit([](const auto& d) { return d.dimension(); }, value_);
}

MeanCovariance moments(const InputDistribution& distribution) {
  if (distribution.is_gaussian()) {
    const auto& g = distribution.gaussian();
    return {g.mean(), g.covariance()};
  }
  const auto& components = distribution.independent().components();
  const Index m = static_cast<Index>(components.size());
  MeanCovariance result{Vector(m), Matrix::Zero(m, m)};
  for (Index p = 0; p < m; ++p) {
    result.mean(p) = mean(components[static_cast<std::size_t>(p)]);
    result.covariance(p, p) = variance(components[static_cast<std::size_t>(p)]);
  }
  return result;
}

UnivariateFamily family_from_variance(IntervalFamily kind, double center, double variance) {
  if (!std::isfinite(variance) || !(variance > 0.0)) {
    std::ostringstream os;
    os << "family_from_variance requires variance > 0 (got " << variance << ")";
    throw ContractError(os.str());
  }
  if (!std::isfinite(center)) throw ContractError("family_from_variance requires a finite center");
  const double half_width = 0.5 * std::sqrt((kind == IntervalFamily::uniform ? 12.0 : 24.0) * variance);
  if (kind == IntervalFamily::uniform) return Uniform(center - half_width, center + half_width);
  return Triangular(center - half_width, center + half_width);
}

InputDistribution recentered(const InputDistribution& distribution, const Vector& center) {
  if (center.size() != distribution.dimension()) {
    throw DimensionMismatch("recentering point", distribution.dimension(), center.size());
  }
  if (distribution.is_gaussian()) {
    return GaussianInput(center, distribution.gaussian().covariance());
  }
  std::vector<UnivariateFamily> shifted;
  const auto& components = distribution.independent().components();
  shifted.reserve(components.size());
  for (std::size_t p = 0; p < components.size(); ++p) {
    const double c = center(static_cast<Index>(p));
    shifted.push_back(std::visit(
        Overloaded{[c](const Uniform& u) -> UnivariateFamily {
                     const double h = 0.5 * (u.upper() - u.lower());
                     return Uniform(c - h, c + h);
                   },
                   [c](const Triangular& t) -> UnivariateFamily {
                     const double h = 0.5 * (t.upper() - t.lower());
                     return Triangular(c - h, c + h);
                   },
                   [c](const Normal& n) -> UnivariateFamily { return Normal(c, n.variance()); }},
        components[p]));
  }
  return IndependentInput(std::move(shifted));
}

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) throw ContractError("std_normal_cdf requires a finite argument");
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ContractError("std_normal_quantile requires p in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

Sampler::Sampler(const InputDistribution& distribution)
    : distribution_(distribution), dimension_(distribution.dimension()) {
  if (distribution_.is_gaussian()) factor_ = linalg::covariance_factor(distribution_.gaussian().covariance());
}

void Sampler::draw(rng::Stream& stream, Eigen::Ref<Matrix> out) const {
  if (out.cols() != dimension_) throw DimensionMismatch("sample buffer columns", dimension_, out.cols());
  const Index count = out.rows();
  if (distribution_.is_gaussian()) {
    Matrix z(count, dimension_);
    for (Index r = 0; r < count; ++r)
      for (Index p = 0; p < dimension_; ++p) z(r, p) = stream.normal();
    out.noalias() = z * factor_.transpose();
    out.rowwise() += distribution_.gaussian().mean().transpose();
    return;
  }
  const auto& components = distribution_.independent().components();
  for (Index r = 0; r < count; ++r) {
    for (Index p = 0; p < dimension_; ++p) {
      out(r, p) = std::visit(
          Overloaded{[&](const Uniform& u) { return u.lower() + (u.upper() - u.lower()) * stream.uniform(); },
                     [&](const Triangular& t) {
                       const double width = t.upper() - t.lower();
                       const double u = stream.uniform();
                       return u < 0.5 ? t.lower() + width * std::sqrt(0.5 * u)
                                      : t.upper() - width * std::sqrt(0.5 * (1.0 - u));
                     },
                     [&](const Normal& n) { return n.mean() + std::sqrt(n.variance()) * stream.normal(); }},
          components[static_cast<std::size_t>(p)]);
    }
  }
}

Matrix Sampler::draw(Index count, std::uint64_t seed, std::uint64_t stream_id) const {
  if (count < 1) throw ContractError("sample count must be at least 1");
  Matrix out(count, dimension_);
  rng::Stream stream(seed, stream_id);
  draw(stream, out);
  return out;
}

Matrix sample(const InputDistribution& distribution, Index count, std::uint64_t seed, std::uint64_t stream_id) {
  return Sampler(distribution).draw(count, seed, stream_id);
}

}  // namespace uqprop
