#include "asketch/metrics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace asketch {

Vector first_six(const Vector& v) {
  Vector out = Vector::Zero(6);
  const Eigen::Index n = std::min<Eigen::Index>(6, v.size());
  out.head(n) = v.head(n);
  return out;
}

double eigenvalue_error(const Vector& reference, const Vector& estimate) {
  if (reference.size() != 6 || estimate.size() != 6) {
    throw std::invalid_argument("eigenvalue_error: both inputs must have length 6 (zero-pad shorter spectra)");
  }
  if (!reference.allFinite() || !estimate.allFinite()) {
    throw std::invalid_argument("eigenvalue_error: non-finite eigenvalue input");
  }
  const double denom = reference.squaredNorm();
  if (denom == 0.0) {
    throw std::invalid_argument("eigenvalue_error: reference eigenvalues are identically zero");
  }
  return std::sqrt((reference - estimate).squaredNorm() / denom);
}

double subspace_error(const Matrix& reference, const Matrix& estimate) {
  if (reference.rows() != estimate.rows() || reference.cols() != estimate.cols()) {
    throw std::invalid_argument("subspace_error: bases must have identical shape");
  }
  const Eigen::Index n = reference.cols();
  if (n < 1 || n > reference.rows()) {
    throw std::invalid_argument("subspace_error: basis must be m x n with 1 <= n <= m");
  }
  const double ortho_tol = 1e-8;
  const Eigen::Index m = reference.rows();
  const Matrix eye = Matrix::Identity(n, n);
  if ((reference.transpose() * reference - eye).norm() > ortho_tol * std::sqrt(double(m)) ||
      (estimate.transpose() * estimate - eye).norm() > ortho_tol * std::sqrt(double(m))) {
    throw std::invalid_argument("subspace_error: basis columns are not orthonormal");
  }

  // sin of the largest principal angle; equals the spectral norm of the
  // projector difference for equal-dimensional subspaces.
  const Matrix residual = estimate - reference * (reference.transpose() * estimate);
  Eigen::JacobiSVD<Matrix> svd(residual);
  const double s = svd.singularValues()[0];
  return std::clamp(s, 0.0, 1.0);
}

}  // namespace asketch
