#include "asketch/testfns.hpp"

#include <Eigen/QR>

#include <cmath>

#include "asketch/rng.hpp"

namespace asketch {

namespace {

// Random orthogonal matrix from a seeded Gaussian draw, with the factor made
// unique by forcing the R diagonal positive.
Matrix random_orthogonal(Eigen::Index m, Eigen::Index cols, std::mt19937_64& gen) {
  const Matrix raw = gaussian_matrix(gen, m, cols);
  Eigen::HouseholderQR<Matrix> qr(raw);
  Matrix q = qr.householderQ() * Matrix::Identity(m, cols);
  const Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace

QuadraticModel::QuadraticModel(Matrix hessian) : hessian_(std::move(hessian)) {
  if (hessian_.rows() != hessian_.cols() || hessian_.rows() < 1) {
    throw std::invalid_argument("QuadraticModel: Hessian must be square");
  }
  if (!hessian_.isApprox(hessian_.transpose(), 1e-12)) {
    throw std::invalid_argument("QuadraticModel: Hessian must be symmetric");
  }
  eig_ = sym_eig(hessian_);
  if (eig_.eigenvalues.minCoeff() < -1e-12 * std::abs(eig_.eigenvalues.maxCoeff())) {
    throw std::invalid_argument("QuadraticModel: Hessian must be positive semidefinite");
  }
}

double QuadraticModel::evaluate(const Vector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("QuadraticModel::evaluate: wrong input length");
  return 0.5 * x.dot(hessian_ * x);
}

Vector QuadraticModel::gradient(const Vector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("QuadraticModel::gradient: wrong input length");
  return hessian_ * x;
}

QuadraticModel build_quadratic(Eigen::Index m, Eigen::Index gap_after, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("build_quadratic: m must be >= 2");
  if (gap_after < 1 || gap_after >= m) {
    throw std::invalid_argument("build_quadratic: need 1 <= gap_after < m");
  }

  // Quarter-decade decay with a 10^{2.5} drop after index gap_after; for the
  // default gap_after = 3 this puts a 10^5 gap between the third and fourth
  // eigenvalues of the gradient covariance.
  Vector d(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double idx = static_cast<double>(i + 1);
    if (idx <= static_cast<double>(gap_after)) {
      d[i] = std::pow(10.0, -(idx - 1.0) / 4.0);
    } else {
      d[i] = std::pow(10.0, -3.0 - (idx - static_cast<double>(gap_after) - 1.0) / 4.0);
    }
  }

  std::mt19937_64 gen(seed);
  const Matrix q = random_orthogonal(m, m, gen);
  Matrix h = q * d.asDiagonal() * q.transpose();
  h = 0.5 * (h + h.transpose());
  return QuadraticModel(std::move(h));
}

SubspaceTruth quadratic_true_active_subspace(const QuadraticModel& model, Eigen::Index n) {
  if (n < 1 || n > model.dim()) {
    throw std::invalid_argument("quadratic_true_active_subspace: need 1 <= n <= m");
  }
  SubspaceTruth out;
  out.basis = model.hessian_eig().eigenvectors.leftCols(n);
  // Uniform density on [-1,1]^m has E[x x'] = I/3, so C = H E[x x'] H = H^2/3.
  out.eigenvalues = model.hessian_eig().eigenvalues.array().square() / 3.0;
  return out;
}

void check_z_model(const ZModelSpec& spec) {
  const Eigen::Index m = spec.directions.rows();
  const Eigen::Index d = spec.directions.cols();
  if (d < 1 || d > m) throw std::invalid_argument("z-model: need 1 <= d <= m directions");
  if (spec.weights.size() != d) throw std::invalid_argument("z-model: one weight per direction");
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(spec.weights[j] > 0.0)) throw std::invalid_argument("z-model: weights must be positive");
    if (j > 0 && spec.weights[j] > spec.weights[j - 1]) {
      throw std::invalid_argument("z-model: weights must be descending");
    }
  }
  const Matrix gram = spec.directions.transpose() * spec.directions;
  if ((gram - Matrix::Identity(d, d)).norm() > 1e-8 * std::sqrt(double(m))) {
    throw std::invalid_argument("z-model: directions must be orthonormal");
  }
}

ZModelSpec make_z_model(Eigen::Index m, const Vector& weights, std::uint64_t seed) {
  if (weights.size() < 1 || weights.size() > m) {
    throw std::invalid_argument("make_z_model: need 1 <= d <= m weights");
  }
  std::mt19937_64 gen(seed);
  ZModelSpec spec;
  spec.directions = random_orthogonal(m, weights.size(), gen);
  spec.weights = weights;
  check_z_model(spec);
  return spec;
}

Matrix sample_z_model(const ZModelSpec& spec, Eigen::Index count, std::uint64_t seed) {
  check_z_model(spec);
  if (count < 1) throw std::invalid_argument("sample_z_model: count must be >= 1");
  std::mt19937_64 gen(seed);
  const Matrix w = gaussian_matrix(gen, spec.weights.size(), count);
  return spec.directions * (spec.weights.asDiagonal() * w);
}

}  // namespace asketch
