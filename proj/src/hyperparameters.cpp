#include "uqprop/errors.hpp"
#include "uqprop/kernel_models.hpp"
#include "uqprop/parallel.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

namespace uqprop {

double log_marginal_likelihood(const Matrix& x_model, const Vector& y_centered, const RbfParams& params,
                               double sigma2) {
  if (x_model.rows() != y_centered.size()) {
    throw DimensionMismatch("marginal likelihood targets", x_model.rows(), y_centered.size());
  }
  Matrix system = kernel_matrix(x_model, params);
  system.diagonal().array() += sigma2;
  Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Vector alpha = llt.solve(y_centered);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double n = static_cast<double>(y_centered.size());
  return -0.5 * y_centered.dot(alpha) - 0.5 * log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

namespace {

// Parameter vector layout in log10 space: [lambda_1 .. lambda_k, sigma2],
// where k = 1 (isotropic) or m (ARD).
struct Objective {
  const Matrix* x;
  const Vector* y;
  double lower_lambda;
  double upper_lambda;
  double lower_sigma2;
  double upper_sigma2;

  RbfParams params_for(const double* v, std::size_t k) const {
    const Index m = x->cols();
    Vector lambdas(m);
    for (Index p = 0; p < m; ++p) lambdas(p) = std::pow(10.0, v[k == 1 ? 0 : p]);
    return RbfParams(std::move(lambdas));
  }

  /// Log likelihood, or -inf outside the search box.
  double evaluate(const double* v, std::size_t k) const {
    for (std::size_t i = 0; i < k; ++i)
      if (!(v[i] >= lower_lambda && v[i] <= upper_lambda)) return -std::numeric_limits<double>::infinity();
    if (!(v[k] >= lower_sigma2 && v[k] <= upper_sigma2)) return -std::numeric_limits<double>::infinity();
    return log_marginal_likelihood(*x, *y, params_for(v, k), std::pow(10.0, v[k]));
  }
};

struct SearchPoint {
  std::vector<double> v;
  double value;
};

struct NelderMeadContext {
  const Objective* objective;
  std::size_t k;
};

double negated(const gsl_vector* v, void* raw) {
  const auto* ctx = static_cast<const NelderMeadContext*>(raw);
  const double value = ctx->objective->evaluate(gsl_vector_const_ptr(v, 0), ctx->k);
  return std::isfinite(value) ? -value : 1e300;
}

SearchPoint refine(const Objective& objective, const SearchPoint& start, std::size_t k, int max_iterations) {
  const std::size_t dim = k + 1;
  NelderMeadContext ctx{&objective, k};
  gsl_multimin_function fn{&negated, dim, &ctx};

  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(dim), &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(dim), &gsl_vector_free);
  for (std::size_t i = 0; i < dim; ++i) gsl_vector_set(x.get(), i, start.v[i]);
  gsl_vector_set_all(step.get(), 0.5);

  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> solver(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim), &gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), step.get());

  for (int iter = 0; iter < max_iterations; ++iter) {
    if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver.get()), 1e-4) == GSL_SUCCESS) break;
  }

  SearchPoint best;
  best.v.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) best.v[i] = gsl_vector_get(solver->x, i);
  best.value = objective.evaluate(best.v.data(), k);
  return best.value > start.value ? best : start;
}

}  // namespace

Hyperparameters optimize_hyperparameters(const Matrix& x, const Vector& y, const HyperparameterOptions& options) {
  if (x.rows() != y.size()) throw DimensionMismatch("target length vs feature rows", x.rows(), y.size());
  if (x.rows() < 5) throw ContractError("hyperparameter optimisation needs at least 5 training points");
  if (!x.allFinite() || !y.allFinite()) throw ContractError("hyperparameter data contains non-finite values");
  if (options.grid_points_per_axis < 2) throw ContractError("hyperparameter grid needs at least 2 points per axis");
  if (y.maxCoeff() == y.minCoeff()) throw ContractError("degenerate target: all y values are identical");

  const auto centering = CenteringTransform::estimate(x, y, options.standardization);
  const Matrix xm = centering.apply_rows(x);
  const Vector yc = y.array() - y.mean();
  const double var_y = yc.squaredNorm() / static_cast<double>(yc.size() - 1);
  const double log_var = std::log10(var_y);

  const Objective objective{&xm,
                            &yc,
                            options.log10_lambda_min - 1.0,
                            options.log10_lambda_max + 1.0,
                            log_var + options.log10_relative_sigma2_min - 1.0,
                            log_var + options.log10_relative_sigma2_max + 1.0};

  const int g = options.grid_points_per_axis;
  std::vector<SearchPoint> grid(static_cast<std::size_t>(g * g));
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < g; ++b) {
      const double t_lambda = static_cast<double>(a) / (g - 1);
      const double t_sigma = static_cast<double>(b) / (g - 1);
      grid[static_cast<std::size_t>(a * g + b)].v = {
          options.log10_lambda_min + t_lambda * (options.log10_lambda_max - options.log10_lambda_min),
          log_var + options.log10_relative_sigma2_min +
              t_sigma * (options.log10_relative_sigma2_max - options.log10_relative_sigma2_min)};
    }
  }
  parallel::for_each_index(grid.size(), options.threads,
                           [&](std::size_t i) { grid[i].value = objective.evaluate(grid[i].v.data(), 1); });

  // First maximum in grid order, so ties resolve deterministically.
  const SearchPoint* best_grid = &grid.front();
  for (const auto& point : grid)
    if (point.value > best_grid->value) best_grid = &point;
  if (!std::isfinite(best_grid->value)) {
    throw NumericalError("hyperparameter search: no grid point gave a positive definite kernel system");
  }

  SearchPoint best = refine(objective, *best_grid, 1, options.max_refinement_iterations);
  std::size_t k = 1;
  if (options.ard && x.cols() > 1) {
    k = static_cast<std::size_t>(x.cols());
    SearchPoint start;
    start.v.assign(k, best.v[0]);
    start.v.push_back(best.v[1]);
    start.value = best.value;
    best = refine(objective, start, k, options.max_refinement_iterations * static_cast<int>(k));
  }

  return {objective.params_for(best.v.data(), k), std::pow(10.0, best.v[k]), best.value};
}

}  // namespace uqprop
