#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <string>

namespace uqprop {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

namespace linalg {

/// Relative scale of the single diagonal jitter tried when a Cholesky
/// factorization fails: jitter = kJitterScale * mean(diag(A)).
inline constexpr double kJitterScale = 1e-10;

/// Tolerance on negative eigenvalues, relative to max(1, largest |eigenvalue|),
/// below which a symmetric matrix still counts as positive semi-definite.
inline constexpr double kPsdTolerance = 1e-10;

struct CholeskyResult {
  Eigen::LLT<Matrix> factor;
  double jitter = 0.0;  // diagonal shift that was added (0 if none)
};

/// Cholesky factorization with one jittered retry. Throws FactorizationError
/// (naming `context` and the jitter tried) when both attempts fail, or when
/// `allow_jitter` is false and the first attempt fails.
CholeskyResult cholesky_with_jitter(const Matrix& a, const std::string& context, bool allow_jitter = true);

bool is_symmetric(const Matrix& a, double tolerance = 1e-12);

/// Eigenvalue test for positive semi-definiteness within kPsdTolerance.
bool is_positive_semidefinite(const Matrix& a);

/// Lower-triangular or symmetric factor A with A·Aᵀ = cov. Uses Cholesky with
/// the jitter retry, falling back to the symmetric eigen square root (negative
/// eigenvalues within tolerance clamped to zero) for semi-definite matrices.
Matrix covariance_factor(const Matrix& cov);

}  // namespace linalg
}  // namespace uqprop
