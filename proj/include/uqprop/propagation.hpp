#pragma once

#include "uqprop/distributions.hpp"
#include "uqprop/kernel_models.hpp"
#include "uqprop/moments.hpp"

namespace uqprop {

/// First and second moments of k* under the input distribution:
/// l_i = E[k(X, x_i)], L_ij = E[k(X, x_i) k(X, x_j)].
struct MomentVectors {
  Vector l;
  Matrix L;
};

/// Exact mean alphaᵀl + y_mean and variance alphaᵀL·alpha - (alphaᵀl)² of
/// the model output under `distribution` (given in raw input units). The
/// output family is left unspecified. L is accumulated pairwise without being
/// stored, so memory stays O(n·m).
Moments propagate(const KernelModel& model, const InputDistribution& distribution);

/// l and L for X ~ N(mu, gamma), with mu and gamma in model coordinates.
MomentVectors moment_vectors_gaussian(const KernelModel& model, const Vector& mu, const Matrix& gamma);

/// l and L for independent components (model coordinates) as products of
/// one-dimensional factors.
MomentVectors moment_vectors_independent(const KernelModel& model, const IndependentInput& components);

// One-dimensional factors. For x ~ F on the real line and kernel scale λ:
//   l(x_i)      = E[exp(-(X - x_i)² / 2λ²)]
//   L(x_i, x_j) = E[exp(-(X - x_i)² / 2λ²) exp(-(X - x_j)² / 2λ²)]
// Intervals narrower than 1% (uniform) or 25% (triangular) of the effective
// Gaussian width are integrated with 15-point Gauss-Legendre instead of the
// closed form, which cancels catastrophically as b - a -> 0.

double l_uniform_1d(double xi, double a, double b, double lambda);
double L_uniform_1d(double xi, double xj, double a, double b, double lambda);
double l_triangular_1d(double xi, double a, double b, double lambda);
double L_triangular_1d(double xi, double xj, double a, double b, double lambda);
double l_normal_1d(double xi, double mean, double variance, double lambda);
double L_normal_1d(double xi, double xj, double mean, double variance, double lambda);

double l_factor(const UnivariateFamily& family, double xi, double lambda);
double L_factor(const UnivariateFamily& family, double xi, double xj, double lambda);

}  // namespace uqprop
