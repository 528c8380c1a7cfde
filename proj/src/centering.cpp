#include "uqprop/centering.hpp"

#include "uqprop/errors.hpp"

#include <cmath>
#include <sstream>

namespace uqprop {

CenteringTransform::CenteringTransform(Vector x_mean, Vector x_scale, double y_mean)
    : x_mean_(std::move(x_mean)), x_scale_(std::move(x_scale)), y_mean_(y_mean) {
  if (x_mean_.size() != x_scale_.size()) {
    throw DimensionMismatch("centering scale vector", x_mean_.size(), x_scale_.size());
  }
  if (!x_mean_.allFinite() || !x_scale_.allFinite() || !std::isfinite(y_mean_)) {
    throw ContractError("centering transform has non-finite entries");
  }
  if (x_scale_.size() > 0 && !(x_scale_.minCoeff() > 0.0)) {
    throw ContractError("centering transform scales must be positive");
  }
}

CenteringTransform CenteringTransform::identity(Index dimension) {
  return {Vector::Zero(dimension), Vector::Ones(dimension), 0.0};
}

CenteringTransform CenteringTransform::estimate(const Matrix& x, const Vector& y, Standardization mode) {
  if (x.rows() != y.size()) throw DimensionMismatch("target length vs feature rows", x.rows(), y.size());
  const Index m = x.cols();
  if (mode == Standardization::none || x.rows() == 0) return identity(m);

  Vector x_mean = x.colwise().mean().transpose();
  Vector x_scale = Vector::Ones(m);
  if (mode == Standardization::center_and_scale) {
    if (x.rows() < 2) throw ContractError("column scaling needs at least two training rows");
    for (Index p = 0; p < m; ++p) {
      const double ss = (x.col(p).array() - x_mean(p)).square().sum();
      const double sd = std::sqrt(ss / static_cast<double>(x.rows() - 1));
      if (!(sd > 0.0)) {
        std::ostringstream os;
        os << "feature column " << p << " has zero variance";
        throw ContractError(os.str());
      }
      x_scale(p) = sd;
    }
  }
  return {std::move(x_mean), std::move(x_scale), y.mean()};
}

Vector CenteringTransform::apply(const Vector& x) const {
  if (x.size() != dimension()) throw DimensionMismatch("input point", dimension(), x.size());
  return ((x - x_mean_).array() / x_scale_.array()).matrix();
}

Matrix CenteringTransform::apply_rows(const Matrix& x) const {
  if (x.cols() != dimension()) throw DimensionMismatch("input columns", dimension(), x.cols());
  return ((x.rowwise() - x_mean_.transpose()).array().rowwise() / x_scale_.transpose().array()).matrix();
}

InputDistribution CenteringTransform::apply(const InputDistribution& distribution) const {
  if (distribution.dimension() != dimension()) {
    throw DimensionMismatch("input distribution", dimension(), distribution.dimension());
  }
  if (distribution.is_gaussian()) {
    const auto& g = distribution.gaussian();
    const Vector inv = x_scale_.cwiseInverse();
    Matrix gamma = inv.asDiagonal() * g.covariance() * inv.asDiagonal();
    return GaussianInput(apply(g.mean()), std::move(gamma));
  }
  std::vector<UnivariateFamily> mapped;
  const auto& components = distribution.independent().components();
  mapped.reserve(components.size());
  for (std::size_t p = 0; p < components.size(); ++p) {
    const double shift = x_mean_(static_cast<Index>(p));
    const double scale = x_scale_(static_cast<Index>(p));
    const auto map = [&](double v) { return (v - shift) / scale; };
    if (const auto* u = std::get_if<Uniform>(&components[p])) {
      mapped.emplace_back(Uniform(map(u->lower()), map(u->upper())));
    } else if (const auto* t = std::get_if<Triangular>(&components[p])) {
      mapped.emplace_back(Triangular(map(t->lower()), map(t->upper())));
    } else {
      const auto& n = std::get<Normal>(components[p]);
      mapped.emplace_back(Normal(map(n.mean()), n.variance() / (scale * scale)));
    }
  }
  return IndependentInput(std::move(mapped));
}

}  // namespace uqprop
