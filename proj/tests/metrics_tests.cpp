// Error metrics.  subspace_error is checked against the literal
// projector-difference definition ||U U' - V V'||_2 computed here with a full
// SVD, and against hand values on rotated coordinate planes; eigenvalue_error
// against hand-computed ratios.

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "asketch/metrics.hpp"
#include "asketch/rng.hpp"

namespace {

using asketch::Matrix;
using asketch::Vector;

// Reference implementation: spectral norm of the projector difference.
double projector_difference_norm(const Matrix& u, const Matrix& v) {
  const Matrix diff = u * u.transpose() - v * v.transpose();
  return Eigen::JacobiSVD<Matrix>(diff).singularValues()[0];
}

Matrix random_orthonormal(std::uint64_t seed, Eigen::Index m, Eigen::Index n) {
  std::mt19937_64 gen(seed);
  const Matrix g = asketch::gaussian_matrix(gen, m, n);
  return Eigen::HouseholderQR<Matrix>(g).householderQ() * Matrix::Identity(m, n);
}

TEST(FirstSix, PadsAndTruncates) {
  Vector short_vec(2);
  short_vec << 5.0, 3.0;
  const Vector padded = asketch::first_six(short_vec);
  ASSERT_EQ(padded.size(), 6);
  EXPECT_EQ(padded[0], 5.0);
  EXPECT_EQ(padded[1], 3.0);
  EXPECT_EQ(padded.tail(4).cwiseAbs().sum(), 0.0);

  const Vector truncated = asketch::first_six(Vector::LinSpaced(9, 9.0, 1.0));
  ASSERT_EQ(truncated.size(), 6);
  EXPECT_EQ(truncated[5], 4.0);
}

TEST(EigenvalueError, HandValuesAndInvariances) {
  Vector ref = Vector::Zero(6);
  ref[0] = 2.0;
  ref[1] = 1.0;
  Vector est = ref;

  EXPECT_DOUBLE_EQ(asketch::eigenvalue_error(ref, est), 0.0);

  est[1] = 0.0;  // squared error 1 against squared scale 5
  EXPECT_NEAR(asketch::eigenvalue_error(ref, est), 1.0 / std::sqrt(5.0), 1e-15);

  // Relative form: scaling both spectra leaves the error unchanged.
  EXPECT_NEAR(asketch::eigenvalue_error(10.0 * ref, 10.0 * est),
              asketch::eigenvalue_error(ref, est), 1e-15);
}

TEST(EigenvalueError, RejectsBadInput) {
  EXPECT_THROW(asketch::eigenvalue_error(Vector::Ones(5), Vector::Ones(6)),
               std::invalid_argument);
  EXPECT_THROW(asketch::eigenvalue_error(Vector::Zero(6), Vector::Ones(6)),
               std::invalid_argument);
  Vector bad = Vector::Ones(6);
  bad[3] = std::nan("");
  EXPECT_THROW(asketch::eigenvalue_error(Vector::Ones(6), bad), std::invalid_argument);
}

TEST(SubspaceError, MatchesProjectorDifferenceDefinition) {
  const struct {
    Eigen::Index m, n;
  } cases[] = {{4, 1}, {6, 2}, {8, 3}, {10, 3}, {12, 6}};
  std::uint64_t seed = 1000;
  for (const auto& c : cases) {
    const Matrix u = random_orthonormal(seed++, c.m, c.n);
    const Matrix v = random_orthonormal(seed++, c.m, c.n);
    EXPECT_NEAR(asketch::subspace_error(u, v), projector_difference_norm(u, v), 1e-10)
        << "m=" << c.m << " n=" << c.n;
  }
}

TEST(SubspaceError, SineOfAngleBetweenRotatedLines) {
  for (const double theta : {0.1, 0.4, 1.0, M_PI / 2}) {
    Matrix u = Matrix::Zero(3, 1);
    u(0, 0) = 1.0;
    Matrix v = Matrix::Zero(3, 1);
    v(0, 0) = std::cos(theta);
    v(1, 0) = std::sin(theta);
    EXPECT_NEAR(asketch::subspace_error(u, v), std::sin(theta), 1e-12);
  }
}

TEST(SubspaceError, RangeSymmetryRotationInvariance) {
  const Matrix u = random_orthonormal(55, 9, 3);
  const Matrix v = random_orthonormal(56, 9, 3);

  const double err = asketch::subspace_error(u, v);
  EXPECT_GE(err, 0.0);
  EXPECT_LE(err, 1.0);
  EXPECT_NEAR(err, asketch::subspace_error(v, u), 1e-12);

  // A basis rotation spans the same subspace.
  const Matrix q = random_orthonormal(57, 3, 3);
  EXPECT_NEAR(asketch::subspace_error(u, v * q), err, 1e-10);

  EXPECT_LT(asketch::subspace_error(u, u * q), 1e-12);

  // Orthogonal subspaces are at the maximum distance.
  Matrix e01 = Matrix::Zero(4, 2);
  e01(0, 0) = e01(1, 1) = 1.0;
  Matrix e23 = Matrix::Zero(4, 2);
  e23(2, 0) = e23(3, 1) = 1.0;
  EXPECT_NEAR(asketch::subspace_error(e01, e23), 1.0, 1e-12);
}

TEST(SubspaceError, RejectsNonOrthonormalOrMismatched) {
  const Matrix u = random_orthonormal(60, 6, 2);
  EXPECT_THROW(asketch::subspace_error(u, random_orthonormal(61, 6, 3)),
               std::invalid_argument);
  EXPECT_THROW(asketch::subspace_error(u, random_orthonormal(62, 7, 2)),
               std::invalid_argument);
  EXPECT_THROW(asketch::subspace_error(u, 2.0 * u), std::invalid_argument);
  EXPECT_THROW(asketch::subspace_error(Matrix::Zero(6, 0), Matrix::Zero(6, 0)),
               std::invalid_argument);
}

}  // namespace
