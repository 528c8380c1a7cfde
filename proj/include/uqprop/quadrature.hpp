#pragma once

#include "uqprop/distributions.hpp"

#include <span>

namespace uqprop {

/// Adaptive Gauss-Kronrod evaluation of
///   ∫ Π_c exp(-(x - c)² / 2λ²) · pdf(x) dx
/// for a univariate weight. Independent of the closed-form factors; used as
/// the reference they are tested against. An empty `centers` integrates the
/// pdf itself. Throws OracleFailure if the error estimate exceeds
/// `absolute_tolerance`.
double quadrature_reference(const UnivariateFamily& weight, std::span<const double> centers, double lambda,
                            double absolute_tolerance = 1e-12);

}  // namespace uqprop
