#include "uqprop/linear.hpp"

#include "uqprop/errors.hpp"

#include <Eigen/QR>

#include <cmath>
#include <sstream>

namespace uqprop {

double clamp_variance(double variance, double tolerance, const char* context) {
  if (variance >= 0.0) return variance;
  if (variance >= -tolerance) return 0.0;
  std::ostringstream os;
  os << context << ": propagated variance " << variance << " is negative beyond rounding tolerance " << tolerance;
  throw ConsistencyError(os.str());
}

LinearModel::LinearModel(Vector beta, CenteringTransform centering)
    : beta_(std::move(beta)), centering_(std::move(centering)) {
  if (!beta_.allFinite()) throw ContractError("linear model weights must be finite");
  if (centering_.dimension() != beta_.size()) {
    throw DimensionMismatch("linear model centering", beta_.size(), centering_.dimension());
  }
}

Vector LinearModel::raw_weights() const { return (beta_.array() / centering_.x_scale().array()).matrix(); }

namespace {

struct Prepared {
  CenteringTransform centering;
  Matrix c;
  Vector y;
};

Prepared prepare(const Matrix& x, const Vector& y, const LinearFitOptions& options) {
  if (x.rows() != y.size()) throw DimensionMismatch("target length vs feature rows", x.rows(), y.size());
  if (x.rows() == 0 || x.cols() == 0) throw ContractError("linear fit needs a non-empty design matrix");
  if (!x.allFinite() || !y.allFinite()) throw ContractError("linear fit data contains non-finite values");
  auto centering = CenteringTransform::estimate(x, y, options.standardization);
  Matrix c = centering.apply_rows(x);
  Vector yc = y.array() - centering.y_mean();
  return {std::move(centering), std::move(c), std::move(yc)};
}

}  // namespace

LinearModel fit_ols(const Matrix& x, const Vector& y, const LinearFitOptions& options) {
  auto prepared = prepare(x, y, options);
  const Index m = prepared.c.cols();
  if (prepared.c.rows() < m) {
    throw SingularMatrixError("ordinary least squares needs n >= m", prepared.c.rows(), m);
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(prepared.c);
  if (qr.rank() < m) throw SingularMatrixError("ordinary least squares", qr.rank(), m);
  Vector beta = qr.solve(prepared.y);
  return {std::move(beta), std::move(prepared.centering)};
}

LinearModel fit_ridge(const Matrix& x, const Vector& y, double sigma2, const LinearFitOptions& options) {
  if (!std::isfinite(sigma2) || sigma2 < 0.0) {
    std::ostringstream os;
    os << "ridge regularisation sigma2 must be >= 0 (got " << sigma2 << ")";
    throw ContractError(os.str());
  }
  if (sigma2 == 0.0) return fit_ols(x, y, options);
  auto prepared = prepare(x, y, options);
  Matrix normal = prepared.c.transpose() * prepared.c;
  normal.diagonal().array() += sigma2;
  Eigen::LLT<Matrix> llt(normal);
  if (llt.info() != Eigen::Success) throw FactorizationError("ridge normal equations", 0.0);
  Vector beta = llt.solve(prepared.c.transpose() * prepared.y);
  return {std::move(beta), std::move(prepared.centering)};
}

double predict(const LinearModel& model, const Vector& x) {
  return model.beta().dot(model.centering().apply(x)) + model.centering().y_mean();
}

Vector predict_rows(const LinearModel& model, const Matrix& x) {
  if (x.cols() != model.dimension()) throw DimensionMismatch("prediction inputs", model.dimension(), x.cols());
  Vector w = model.raw_weights();
  const double offset = model.centering().y_mean() - w.dot(model.centering().x_mean());
  Vector out = x * w;
  out.array() += offset;
  return out;
}

Moments propagate(const LinearModel& model, const InputDistribution& distribution) {
  if (distribution.dimension() != model.dimension()) {
    throw DimensionMismatch("linear propagation input distribution", model.dimension(), distribution.dimension());
  }
  // Transforming the weights instead of the distribution keeps the O(m²)
  // quadratic form as the only heavy operation.
  const Vector w = model.raw_weights();
  const auto& centering = model.centering();
  Moments result;
  if (distribution.is_gaussian()) {
    const auto& g = distribution.gaussian();
    result.mean = w.dot(g.mean() - centering.x_mean()) + centering.y_mean();
    const Matrix& gamma = g.covariance();
    const double quad = w.dot(gamma * w);
    // The clamp scale costs a second pass over Gamma; only rounding-negative
    // forms need it.
    double scale = 0.0;
    if (quad < 0.0) {
      const Vector abs_w = w.cwiseAbs();
      for (Index j = 0; j < gamma.cols(); ++j) scale += abs_w(j) * gamma.col(j).cwiseAbs().dot(abs_w);
    }
    result.variance = clamp_variance(quad, 1e-12 * std::max(1.0, scale), "linear propagation");
    result.family = OutputFamily::gaussian;
  } else {
    const auto mc = moments(distribution);
    result.mean = w.dot(mc.mean - centering.x_mean()) + centering.y_mean();
    result.variance = (w.array().square() * mc.covariance.diagonal().array()).sum();
    result.family = OutputFamily::unspecified;
  }
  return result;
}

Interval credible_interval(const Moments& moments, double coverage) {
  if (moments.family != OutputFamily::gaussian) {
    throw UnsupportedError("credible intervals need a Gaussian output; only the moments are known here");
  }
  if (!(coverage > 0.0 && coverage < 1.0)) throw ContractError("coverage must lie in (0, 1)");
  if (moments.variance == 0.0) return {moments.mean, moments.mean};
  const double z = std_normal_quantile(0.5 * (1.0 + coverage));
  const double half = z * std::sqrt(moments.variance);
  return {moments.mean - half, moments.mean + half};
}

}  // namespace uqprop
