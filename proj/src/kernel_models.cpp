#include "uqprop/kernel_models.hpp"

#include "uqprop/errors.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace uqprop {

std::string_view provenance_name(Provenance provenance) {
  switch (provenance) {
    case Provenance::ridge: return "ridge";
    case Provenance::gp: return "gp";
    case Provenance::external: return "external";
  }
  return "external";
}

Provenance provenance_from_name(std::string_view name) {
  if (name == "ridge") return Provenance::ridge;
  if (name == "gp") return Provenance::gp;
  if (name == "external") return Provenance::external;
  throw ContractError("unknown kernel model provenance '" + std::string(name) + "'");
}

namespace {

std::shared_ptr<const linalg::CholeskyResult> factor_system(const Matrix& train_x, const RbfParams& params,
                                                            double sigma2) {
  Matrix system = kernel_matrix(train_x, params);
  system.diagonal().array() += sigma2;
  return std::make_shared<const linalg::CholeskyResult>(
      linalg::cholesky_with_jitter(system, "kernel system K + sigma2*I", sigma2 > 0.0));
}

// Σ_i alpha_i exp(-1/2 Σ_p ((z_p - x_ip)/λ_p)²) for one point in model coordinates.
double alpha_form(const KernelModel& model, const Vector& inv_lambda, const double* z) {
  const Matrix& train = model.train_x();
  const Vector& alpha = model.alpha();
  const Index n = train.rows();
  const Index m = train.cols();
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    double d2 = 0.0;
    for (Index p = 0; p < m; ++p) {
      const double t = (z[p] - train(i, p)) * inv_lambda(p);
      d2 += t * t;
    }
    sum += alpha(i) * std::exp(-0.5 * d2);
  }
  return sum;
}

}  // namespace

KernelModel::KernelModel(Vector alpha, Matrix train_x, RbfParams params, double sigma2,
                         CenteringTransform centering, Provenance provenance)
    : alpha_(std::move(alpha)),
      train_x_(std::move(train_x)),
      params_(std::move(params)),
      sigma2_(sigma2),
      centering_(std::move(centering)),
      provenance_(provenance) {
  validate();
  if (provenance_ != Provenance::external) factor_ = factor_system(train_x_, params_, sigma2_);
}

KernelModel::KernelModel(Vector alpha, Matrix train_x, RbfParams params, double sigma2,
                         CenteringTransform centering, Provenance provenance,
                         std::shared_ptr<const linalg::CholeskyResult> system_factor)
    : alpha_(std::move(alpha)),
      train_x_(std::move(train_x)),
      params_(std::move(params)),
      sigma2_(sigma2),
      centering_(std::move(centering)),
      provenance_(provenance),
      factor_(std::move(system_factor)) {
  validate();
  if (factor_ && factor_->factor.rows() != train_x_.rows()) {
    throw DimensionMismatch("kernel system factor", train_x_.rows(), factor_->factor.rows());
  }
  if (provenance_ == Provenance::external) factor_.reset();
}

void KernelModel::validate() const {
  if (train_x_.rows() < 1) throw ContractError("kernel model needs at least one training point");
  if (alpha_.size() != train_x_.rows()) {
    throw DimensionMismatch("kernel model alpha length vs training rows", train_x_.rows(), alpha_.size());
  }
  if (params_.dimension() != train_x_.cols()) {
    throw DimensionMismatch("kernel length scales vs input dimension", train_x_.cols(), params_.dimension());
  }
  if (centering_.dimension() != train_x_.cols()) {
    throw DimensionMismatch("kernel model centering", train_x_.cols(), centering_.dimension());
  }
  if (!std::isfinite(sigma2_) || sigma2_ < 0.0) throw ContractError("kernel model sigma2 must be >= 0");
  if (!alpha_.allFinite() || !train_x_.allFinite()) throw ContractError("kernel model has non-finite entries");
}

KernelModel fit_kernel_ridge(const Matrix& x, const Vector& y, const RbfParams& params, double sigma2,
                             const KernelFitOptions& options) {
  if (!std::isfinite(sigma2) || sigma2 < 0.0) {
    std::ostringstream os;
    os << "kernel regularisation sigma2 must be >= 0 (got " << sigma2 << ")";
    throw ContractError(os.str());
  }
  if (options.provenance == Provenance::external) throw ContractError("a fitted kernel model cannot be external");
  if (x.rows() != y.size()) throw DimensionMismatch("target length vs feature rows", x.rows(), y.size());
  if (!x.allFinite() || !y.allFinite()) throw ContractError("kernel fit data contains non-finite values");
  if (params.dimension() != x.cols()) {
    throw DimensionMismatch("kernel length scales vs input dimension", x.cols(), params.dimension());
  }

  auto centering = CenteringTransform::estimate(x, y, options.standardization);
  Matrix train = centering.apply_rows(x);
  const Vector yc = y.array() - centering.y_mean();
  auto factor = factor_system(train, params, sigma2);
  Vector alpha = factor->factor.solve(yc);
  return {std::move(alpha), std::move(train), params, sigma2, std::move(centering), options.provenance,
          std::move(factor)};
}

KernelModel fit_gp(const Matrix& x, const Vector& y, const RbfParams& params, double sigma2,
                   Standardization standardization) {
  return fit_kernel_ridge(x, y, params, sigma2, {standardization, Provenance::gp});
}

KernelModel from_external_alpha(Vector alpha, Matrix train_x, RbfParams params, CenteringTransform centering) {
  return {std::move(alpha), std::move(train_x), std::move(params), 0.0, std::move(centering), Provenance::external};
}

double predict(const KernelModel& model, const Vector& xstar) {
  const Vector z = model.centering().apply(xstar);
  return alpha_form(model, model.params().lambdas().cwiseInverse(), z.data()) + model.centering().y_mean();
}

Vector predict_rows(const KernelModel& model, const Matrix& x) {
  if (x.cols() != model.dimension()) throw DimensionMismatch("prediction inputs", model.dimension(), x.cols());
  const Matrix z = model.centering().apply_rows(x).transpose();  // one point per column
  const Vector inv = model.params().lambdas().cwiseInverse();
  Vector out(x.rows());
  for (Index r = 0; r < x.rows(); ++r) out(r) = alpha_form(model, inv, z.col(r).data()) + model.centering().y_mean();
  return out;
}

double gp_posterior_variance(const KernelModel& model, const Vector& xstar) {
  const auto* factor = model.system_factor();
  if (model.provenance() == Provenance::external || factor == nullptr) {
    throw UnsupportedError("posterior variance is undefined for an externally supplied alpha");
  }
  const Vector z = model.centering().apply(xstar);
  const Vector k = kstar(model.train_x(), z, model.params());
  const Vector v = factor->factor.matrixL().solve(k);
  const double variance = 1.0 - v.squaredNorm();
  if (variance < 0.0 && variance >= -1e-12) return 0.0;
  return std::max(variance, 0.0);
}

}  // namespace uqprop
