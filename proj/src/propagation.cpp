#include "uqprop/propagation.hpp"

#include "uqprop/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace uqprop {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;  // sqrt(2π)
constexpr double kNarrowUniform = 1e-2;
constexpr double kNarrowTriangular = 0.25;
constexpr Index kLogSpaceDimension = 50;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double ccdf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Φ(hi) - Φ(lo) for lo <= hi, evaluated on the side of the tail that avoids
// subtracting two numbers close to 1.
double cdf_difference(double lo, double hi) {
  if (lo > 0.0) return ccdf(lo) - ccdf(hi);
  return cdf(hi) - cdf(lo);
}

void require_interval(double a, double b, double lambda, const char* what) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    std::ostringstream os;
    os << what << ": degenerate interval [" << a << ", " << b << "]";
    throw ContractError(os.str());
  }
  if (!std::isfinite(lambda) || !(lambda > 0.0)) {
    std::ostringstream os;
    os << what << ": length scale must be positive (got " << lambda << ")";
    throw ContractError(os.str());
  }
}

double gauss(double t, double center, double width) {
  const double z = (t - center) / width;
  return std::exp(-0.5 * z * z);
}

double gauss_legendre(double a, double b, const auto& f) {
  return boost::math::quadrature::gauss<double, 15>::integrate(f, a, b);
}

// ∫_a^b exp(-(t - x)²/2s²) dt / (b - a)
double uniform_gauss_mean(double x, double a, double b, double s) {
  const double w = b - a;
  if (w < kNarrowUniform * s) {
    return gauss_legendre(a, b, [&](double t) { return gauss(t, x, s); }) / w;
  }
  return s * kSqrt2Pi / w * cdf_difference((a - x) / s, (b - x) / s);
}

// ∫ triangular_pdf(t) exp(-(t - x)²/2s²) dt for the symmetric triangle on [a, b].
double triangular_gauss_mean(double x, double a, double b, double s) {
  const double w = b - a;
  const double c = 0.5 * (a + b);
  if (w < kNarrowTriangular * s) {
    // Offsets u from the end points are integrated directly; forming t - a
    // from absolute positions would lose digits when the support is tiny.
    const double h = 0.5 * w;
    const double left = gauss_legendre(0.0, h, [&](double u) { return u * gauss(a + u, x, s); });
    const double right = gauss_legendre(0.0, h, [&](double u) { return u * gauss(b - u, x, s); });
    return (left + right) / (h * h);
  }
  const double da = a - x;
  const double db = b - x;
  const double dc = c - x;
  const double exps = gauss(a, x, s) + gauss(b, x, s) - 2.0 * gauss(c, x, s);
  // (a-x)Φ_a + (b-x)Φ_b - (a+b-2x)Φ_c; the linear coefficients sum to zero,
  // so Φ may be swapped for -(1-Φ) when the arguments are mostly positive.
  double linear;
  if (dc > 0.0) {
    linear = -(da * ccdf(da / s) + db * ccdf(db / s) - 2.0 * dc * ccdf(dc / s));
  } else {
    linear = da * cdf(da / s) + db * cdf(db / s) - 2.0 * dc * cdf(dc / s);
  }
  return std::max(0.0, 4.0 / (w * w) * (s * s * exps + s * kSqrt2Pi * linear));
}

}  // namespace

double l_uniform_1d(double xi, double a, double b, double lambda) {
  require_interval(a, b, lambda, "l_uniform_1d");
  return uniform_gauss_mean(xi, a, b, lambda);
}

double L_uniform_1d(double xi, double xj, double a, double b, double lambda) {
  require_interval(a, b, lambda, "L_uniform_1d");
  const double d = xi - xj;
  const double midpoint = 0.5 * (xi + xj);
  // exp(-(t-xi)²/2λ²)·exp(-(t-xj)²/2λ²) = exp(-d²/4λ²)·exp(-(t-midpoint)²/λ²)
  return std::exp(-d * d / (4.0 * lambda * lambda)) *
         uniform_gauss_mean(midpoint, a, b, lambda / std::numbers::sqrt2);
}

double l_triangular_1d(double xi, double a, double b, double lambda) {
  require_interval(a, b, lambda, "l_triangular_1d");
  return triangular_gauss_mean(xi, a, b, lambda);
}

double L_triangular_1d(double xi, double xj, double a, double b, double lambda) {
  require_interval(a, b, lambda, "L_triangular_1d");
  const double d = xi - xj;
  const double midpoint = 0.5 * (xi + xj);
  return std::exp(-d * d / (4.0 * lambda * lambda)) *
         triangular_gauss_mean(midpoint, a, b, lambda / std::numbers::sqrt2);
}

double l_normal_1d(double xi, double mean, double variance, double lambda) {
  const double l2 = lambda * lambda;
  const double d = mean - xi;
  return std::exp(-0.5 * d * d / (l2 + variance)) / std::sqrt(1.0 + variance / l2);
}

double L_normal_1d(double xi, double xj, double mean, double variance, double lambda) {
  const double l2 = lambda * lambda;
  const double dm = mean - 0.5 * (xi + xj);
  const double dx = xi - xj;
  return std::exp(-0.5 * (dm * dm / (0.5 * l2 + variance) + dx * dx / (2.0 * l2))) /
         std::sqrt(1.0 + 2.0 * variance / l2);
}

double l_factor(const UnivariateFamily& family, double xi, double lambda) {
  return std::visit(
      Overloaded{[&](const Uniform& u) { return l_uniform_1d(xi, u.lower(), u.upper(), lambda); },
                 [&](const Triangular& t) { return l_triangular_1d(xi, t.lower(), t.upper(), lambda); },
                 [&](const Normal& n) { return l_normal_1d(xi, n.mean(), n.variance(), lambda); }},
      family);
}

double L_factor(const UnivariateFamily& family, double xi, double xj, double lambda) {
  return std::visit(
      Overloaded{[&](const Uniform& u) { return L_uniform_1d(xi, xj, u.lower(), u.upper(), lambda); },
                 [&](const Triangular& t) { return L_triangular_1d(xi, xj, t.lower(), t.upper(), lambda); },
                 [&](const Normal& n) { return L_normal_1d(xi, xj, n.mean(), n.variance(), lambda); }},
      family);
}

namespace {

// Entries of l and L for a Gaussian input, with the quadratic forms reduced
// to squared norms of pre-whitened vectors:
//   (mu - x_i)ᵀ(Λ + Γ)⁻¹(mu - x_i)        = |u_i|²,   u_i = R⁻¹(mu - x_i), RRᵀ = Λ + Γ
//   (mu - m_ij)ᵀ(Λ/2 + Γ)⁻¹(mu - m_ij)    = |v_i + v_j|²/4, v_i = S⁻¹(mu - x_i), SSᵀ = Λ/2 + Γ
//   (x_i - x_j)ᵀ(2Λ)⁻¹(x_i - x_j)          = |s_i - s_j|²/2, s_i = x_i/λ
class GaussianEntries {
 public:
  GaussianEntries(const KernelModel& model, const Vector& mu, const Matrix& gamma) {
    const Index m = model.dimension();
    if (mu.size() != m) throw DimensionMismatch("Gaussian input mean", m, mu.size());
    if (gamma.rows() != m || gamma.cols() != m) throw DimensionMismatch("Gaussian input covariance", m, gamma.rows());
    const Vector& lambdas = model.params().lambdas();
    const Vector lambda2 = lambdas.array().square();
    const Vector inv = lambdas.cwiseInverse();

    const Matrix scaled_gamma = inv.asDiagonal() * gamma * inv.asDiagonal();
    l_scale_ = std::exp(-0.5 * log_det_identity_plus(scaled_gamma, "|Λ⁻¹Γ + I|"));
    L_scale_ = std::exp(-0.5 * log_det_identity_plus(2.0 * scaled_gamma, "|2Λ⁻¹Γ + I|"));

    const Matrix diff = (-model.train_x()).rowwise() + mu.transpose();  // rows: mu - x_i
    Matrix b = gamma;
    b.diagonal() += lambda2;
    u_ = whiten(b, diff, "Λ + Γ");
    Matrix half = gamma;
    half.diagonal() += 0.5 * lambda2;
    v_ = whiten(half, diff, "Λ/2 + Γ");
    s_ = (model.train_x() * inv.asDiagonal()).transpose();
  }

  double l(Index i) const { return l_scale_ * std::exp(-0.5 * u_.col(i).squaredNorm()); }

  double L(Index i, Index j) const {
    const Index m = v_.rows();
    double q_mid = 0.0;
    double q_pair = 0.0;
    for (Index p = 0; p < m; ++p) {
      const double vm = v_(p, i) + v_(p, j);
      const double sd = s_(p, i) - s_(p, j);
      q_mid += vm * vm;
      q_pair += sd * sd;
    }
    return L_scale_ * std::exp(-0.125 * q_mid - 0.25 * q_pair);
  }

 private:
  static double log_det_identity_plus(const Matrix& a, const char* what) {
    Matrix s = a;
    s.diagonal().array() += 1.0;
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() != Eigen::Success) throw NumericalError(std::string("Cholesky of ") + what + " failed");
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }

  // Columns of the result are R⁻¹·(row i of diff)ᵀ with RRᵀ = a.
  static Matrix whiten(const Matrix& a, const Matrix& diff, const char* what) {
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) throw NumericalError(std::string("solve with ") + what + " failed");
    Matrix out = diff.transpose();
    llt.matrixL().solveInPlace(out);
    return out;
  }

  double l_scale_ = 1.0;
  double L_scale_ = 1.0;
  Matrix u_;  // m x n
  Matrix v_;  // m x n
  Matrix s_;  // m x n
};

class IndependentEntries {
 public:
  IndependentEntries(const KernelModel& model, const IndependentInput& input)
      : components_(&input.components()), train_(&model.train_x()), lambdas_(&model.params().lambdas()) {
    if (input.dimension() != model.dimension()) {
      throw DimensionMismatch("independent input components", model.dimension(), input.dimension());
    }
    log_space_ = model.dimension() > kLogSpaceDimension;
  }

  double l(Index i) const {
    const Index m = train_->cols();
    if (log_space_) {
      double sum = 0.0;
      for (Index p = 0; p < m; ++p) sum += std::log(l_factor(component(p), (*train_)(i, p), (*lambdas_)(p)));
      return std::exp(sum);
    }
    double product = 1.0;
    for (Index p = 0; p < m; ++p) product *= l_factor(component(p), (*train_)(i, p), (*lambdas_)(p));
    return product;
  }

  double L(Index i, Index j) const {
    const Index m = train_->cols();
    if (log_space_) {
      double sum = 0.0;
      for (Index p = 0; p < m; ++p)
        sum += std::log(L_factor(component(p), (*train_)(i, p), (*train_)(j, p), (*lambdas_)(p)));
      return std::exp(sum);
    }
    double product = 1.0;
    for (Index p = 0; p < m; ++p) product *= L_factor(component(p), (*train_)(i, p), (*train_)(j, p), (*lambdas_)(p));
    return product;
  }

 private:
  const UnivariateFamily& component(Index p) const { return (*components_)[static_cast<std::size_t>(p)]; }

  const std::vector<UnivariateFamily>* components_;
  const Matrix* train_;
  const Vector* lambdas_;
  bool log_space_ = false;
};

template <class Entries>
MomentVectors assemble(const Entries& entries, Index n) {
  MomentVectors result{Vector(n), Matrix(n, n)};
  for (Index i = 0; i < n; ++i) result.l(i) = entries.l(i);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      const double value = entries.L(i, j);
      result.L(i, j) = value;
      result.L(j, i) = value;
    }
  }
  return result;
}

template <class Entries>
Moments reduce(const Entries& entries, const KernelModel& model) {
  const Vector& alpha = model.alpha();
  std::vector<Index> active;
  active.reserve(static_cast<std::size_t>(alpha.size()));
  for (Index i = 0; i < alpha.size(); ++i)
    if (alpha(i) != 0.0) active.push_back(i);

  double mean = 0.0;
  for (Index i : active) mean += alpha(i) * entries.l(i);

  // alphaᵀLα over the upper triangle, row by row in a fixed order.
  double quad = 0.0;
  double scale = 0.0;
  for (std::size_t a = 0; a < active.size(); ++a) {
    const Index i = active[a];
    double row = 0.0;
    double row_abs = 0.0;
    for (std::size_t b = a + 1; b < active.size(); ++b) {
      const Index j = active[b];
      const double term = alpha(j) * entries.L(i, j);
      row += term;
      row_abs += std::abs(term);
    }
    const double diag = alpha(i) * entries.L(i, i);
    quad += alpha(i) * (diag + 2.0 * row);
    scale += std::abs(alpha(i)) * (std::abs(diag) + 2.0 * row_abs);
  }

  Moments result;
  result.mean = mean + model.centering().y_mean();
  result.variance =
      clamp_variance(quad - mean * mean, 1e-12 * std::max(1.0, scale), "kernel propagation");
  result.family = OutputFamily::unspecified;
  return result;
}

}  // namespace

MomentVectors moment_vectors_gaussian(const KernelModel& model, const Vector& mu, const Matrix& gamma) {
  return assemble(GaussianEntries(model, mu, gamma), model.size());
}

MomentVectors moment_vectors_independent(const KernelModel& model, const IndependentInput& components) {
  return assemble(IndependentEntries(model, components), model.size());
}

Moments propagate(const KernelModel& model, const InputDistribution& distribution) {
  if (distribution.dimension() != model.dimension()) {
    throw DimensionMismatch("kernel propagation input distribution", model.dimension(), distribution.dimension());
  }
  const InputDistribution local = model.centering().apply(distribution);
  if (local.is_gaussian()) {
    const auto& g = local.gaussian();
    return reduce(GaussianEntries(model, g.mean(), g.covariance()), model);
  }
  return reduce(IndependentEntries(model, local.independent()), model);
}

}  // namespace uqprop
