// Estimator pipeline: symmetric eigensolver conventions, the two C estimates,
// and the alternating least-squares fit.  Each numerical routine is compared
// against a slower, independently written formula (naive accumulation loops,
// pseudoinverse projections, a full SVD of the explicit product) rather than
// against its own internals.

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "asketch/estimators.hpp"
#include "asketch/metrics.hpp"
#include "asketch/rng.hpp"

namespace {

using asketch::Matrix;
using asketch::Vector;

// Orthogonal projector onto range(E) by explicit pseudoinverse; the reference
// implementation the fast path must match.
Matrix projector_onto(const Matrix& sketch) {
  const Matrix gram = sketch.transpose() * sketch;
  return sketch * gram.fullPivLu().solve(sketch.transpose());
}

Matrix random_gaussian(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols) {
  std::mt19937_64 gen(seed);
  return asketch::gaussian_matrix(gen, rows, cols);
}

bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

// Orthonormal basis of a matrix's column span.
Matrix column_span(const Matrix& a) {
  return Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(a.rows(), a.cols());
}

// Builds a measurement set for a fixed gradient matrix: fresh sketches, then
// m_i = E_i' g_i column by column.
asketch::MeasurementSet measure(const Matrix& gradients, Eigen::Index k, std::uint64_t seed) {
  asketch::MeasurementSet ms;
  ms.sketches = asketch::draw_sketches(gradients.rows(), k, gradients.cols(), seed);
  ms.measurements.resize(k, gradients.cols());
  for (Eigen::Index i = 0; i < gradients.cols(); ++i) {
    ms.measurements.col(i) = ms.sketches.matrices[static_cast<std::size_t>(i)].transpose() *
                             gradients.col(i);
  }
  return ms;
}

TEST(SymEig, ReconstructsAndOrdersDescending) {
  const Matrix g = random_gaussian(17, 12, 12);
  const Matrix s = g + g.transpose();
  const asketch::EigenDecomposition eig = asketch::sym_eig(s);

  ASSERT_EQ(eig.eigenvalues.size(), 12);
  for (Eigen::Index i = 0; i + 1 < 12; ++i) {
    EXPECT_GE(eig.eigenvalues[i], eig.eigenvalues[i + 1]);
  }
  const Matrix rebuilt =
      eig.eigenvectors * eig.eigenvalues.asDiagonal() * eig.eigenvectors.transpose();
  EXPECT_LT((rebuilt - s).norm(), 1e-10 * s.norm());
  EXPECT_LT((eig.eigenvectors.transpose() * eig.eigenvectors - Matrix::Identity(12, 12)).norm(),
            1e-12);
}

TEST(SymEig, SignConventionAndSymmetrization) {
  const Matrix g = random_gaussian(29, 9, 9);
  const asketch::EigenDecomposition eig = asketch::sym_eig(g + g.transpose());
  for (Eigen::Index j = 0; j < 9; ++j) {
    Eigen::Index idx = 0;
    eig.eigenvectors.col(j).cwiseAbs().maxCoeff(&idx);
    EXPECT_GT(eig.eigenvectors(idx, j), 0.0);
  }

  // A non-symmetric input is treated as its symmetric part.
  const Matrix skewed = random_gaussian(31, 7, 7);
  const Matrix sym_part = 0.5 * (skewed + skewed.transpose());
  const asketch::EigenDecomposition a = asketch::sym_eig(skewed);
  const asketch::EigenDecomposition b = asketch::sym_eig(sym_part);
  EXPECT_LT((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SymEig, RejectsBadInput) {
  EXPECT_THROW(asketch::sym_eig(Matrix::Zero(3, 4)), std::invalid_argument);
  Matrix nan3 = Matrix::Zero(3, 3);
  nan3(1, 1) = std::nan("");
  EXPECT_THROW(asketch::sym_eig(nan3), std::invalid_argument);
}

TEST(EstimateCMonteCarlo, MatchesNaiveAccumulation) {
  const Matrix gradients = random_gaussian(5, 6, 40);
  Matrix naive = Matrix::Zero(6, 6);
  for (Eigen::Index i = 0; i < gradients.cols(); ++i) {
    naive += gradients.col(i) * gradients.col(i).transpose();
  }
  naive /= static_cast<double>(gradients.cols());

  const asketch::EigenDecomposition eig = asketch::estimate_c_monte_carlo(gradients);
  const Matrix rebuilt =
      eig.eigenvectors * eig.eigenvalues.asDiagonal() * eig.eigenvectors.transpose();
  EXPECT_LT((rebuilt - naive).norm(), 1e-12 * naive.norm());
  EXPECT_GE(eig.eigenvalues.minCoeff(), -1e-12);  // PSD up to roundoff
}

TEST(DrawSketches, ShapesSeedsValidation) {
  const asketch::SketchSet set = asketch::draw_sketches(10, 4, 7, 123);
  ASSERT_EQ(set.matrices.size(), 7u);
  EXPECT_EQ(set.seed, 123u);
  for (const Matrix& e : set.matrices) {
    EXPECT_EQ(e.rows(), 10);
    EXPECT_EQ(e.cols(), 4);
  }
  EXPECT_FALSE(bit_equal(set.matrices[0], set.matrices[1]));  // independent draws

  const asketch::SketchSet again = asketch::draw_sketches(10, 4, 7, 123);
  EXPECT_TRUE(bit_equal(set.matrices[3], again.matrices[3]));

  EXPECT_THROW(asketch::draw_sketches(10, 0, 7, 1), std::invalid_argument);
  EXPECT_THROW(asketch::draw_sketches(10, 11, 7, 1), std::invalid_argument);
  EXPECT_THROW(asketch::draw_sketches(10, 4, 0, 1), std::invalid_argument);
}

TEST(ProjectMeasurement, MatchesPseudoinverseProjection) {
  const Matrix sketch = random_gaussian(41, 7, 3);
  const Vector z = random_gaussian(43, 7, 1);
  const Vector m_vec = sketch.transpose() * z;

  const Vector projected = asketch::project_measurement(sketch, m_vec);
  const Vector expected = projector_onto(sketch) * z;
  EXPECT_LT((projected - expected).norm(), 1e-12 * expected.norm());

  // Projecting a vector already in range(E) is the identity.
  const Vector again = asketch::project_measurement(sketch, sketch.transpose() * projected);
  EXPECT_LT((again - projected).norm(), 1e-12 * projected.norm());
}

TEST(ProjectMeasurement, SingularGramIsANumericalError) {
  Matrix sketch(4, 2);
  sketch.col(0) << 1.0, 2.0, 3.0, 4.0;
  sketch.col(1) = sketch.col(0);
  const Vector m_vec = Vector::Ones(2);
  EXPECT_THROW(asketch::project_measurement(sketch, m_vec), asketch::numerical_error);
}

TEST(EstimateCProjection, MatchesNaiveProjectedAccumulation) {
  const Matrix gradients = random_gaussian(53, 8, 30);
  const asketch::MeasurementSet ms = measure(gradients, 3, 59);

  Matrix naive = Matrix::Zero(8, 8);
  for (Eigen::Index i = 0; i < gradients.cols(); ++i) {
    const Vector p = projector_onto(ms.sketches.matrices[static_cast<std::size_t>(i)]) *
                     gradients.col(i);
    naive += p * p.transpose();
  }
  naive /= static_cast<double>(gradients.cols());

  const asketch::EigenDecomposition eig = asketch::estimate_c_projection(ms);
  const Matrix rebuilt =
      eig.eigenvectors * eig.eigenvalues.asDiagonal() * eig.eigenvectors.transpose();
  EXPECT_LT((rebuilt - naive).norm(), 1e-12 * naive.norm());
}

TEST(AlsInit, ScalesLeadingEigenvectorsBySqrtEigenvalues) {
  asketch::EigenDecomposition cp;
  cp.eigenvalues = Vector(4);
  cp.eigenvalues << 4.0, 1.0, 0.25, -1e-18;  // tiny negative tail gets clamped
  cp.eigenvectors = column_span(random_gaussian(61, 4, 4));

  const Matrix a0 = asketch::als_init(cp, 4);
  for (Eigen::Index j = 0; j < 3; ++j) {
    const double scale = std::sqrt(cp.eigenvalues[j]);
    EXPECT_LT((a0.col(j) - scale * cp.eigenvectors.col(j)).norm(), 1e-14);
  }
  EXPECT_EQ(a0.col(3).norm(), 0.0);

  EXPECT_THROW(asketch::als_init(cp, 0), std::invalid_argument);
  EXPECT_THROW(asketch::als_init(cp, 5), std::invalid_argument);
}

TEST(AlsFit, RecoversPlantedLowRankExactly) {
  // Rank-2 gradients in 8 dimensions, measured through k=4 sketches: the
  // global optimum interpolates the data, so the fit must reach an objective
  // at the noise floor and recover the planted column span.
  const Eigen::Index m = 8, r = 2, count = 60;
  const Matrix a_true = random_gaussian(71, m, r);
  const Matrix b_true = random_gaussian(73, count, r);
  const Matrix gradients = a_true * b_true.transpose();
  const asketch::MeasurementSet ms = measure(gradients, 4, 79);

  asketch::AlsConfig cfg;
  cfg.rank = r;
  // The default change-based stop would fire while the linearly convergent
  // tail is still an order above the target, so tighten it for the oracle.
  cfg.tolerance = 1e-13;
  cfg.max_iterations = 500;
  const Matrix a0 = asketch::als_init(asketch::estimate_c_projection(ms), r);
  const asketch::AlsResult fit = asketch::als_fit(ms, cfg, a0);

  ASSERT_FALSE(fit.trace.empty());
  EXPECT_TRUE(fit.converged);
  EXPECT_LE(fit.trace.back(), 1e-8 * ms.measurements.norm());

  const asketch::SubspaceResult sub = asketch::subspace_from_factors(fit.factors, r);
  EXPECT_LE(asketch::subspace_error(column_span(a_true), sub.basis), 1e-6);
}

TEST(AlsFit, TraceIsPerHalfStepAndNonIncreasing) {
  const Matrix gradients = random_gaussian(83, 10, 50);  // full-rank data
  const asketch::MeasurementSet ms = measure(gradients, 5, 89);

  asketch::AlsConfig cfg;
  cfg.rank = 3;
  const Matrix a0 = asketch::als_init(asketch::estimate_c_projection(ms), 3);
  const asketch::AlsResult fit = asketch::als_fit(ms, cfg, a0);

  ASSERT_EQ(fit.trace.size(), static_cast<std::size_t>(2 * fit.iterations));
  EXPECT_GE(fit.iterations, 2);  // the stop test needs two full iterations
  const double allowance = 1e-12 * std::max(1.0, fit.trace.front());
  for (std::size_t t = 1; t < fit.trace.size(); ++t) {
    EXPECT_LE(fit.trace[t], fit.trace[t - 1] + allowance) << "half-step " << t;
  }
}

TEST(AlsFit, RidgeKeepsMonotoneTraceAndFiniteFactors) {
  const Matrix gradients = random_gaussian(97, 9, 40);
  const asketch::MeasurementSet ms = measure(gradients, 4, 101);

  asketch::AlsConfig cfg;
  cfg.rank = 3;
  cfg.ridge = 1e-8;
  const Matrix a0 = asketch::als_init(asketch::estimate_c_projection(ms), 3);
  const asketch::AlsResult fit = asketch::als_fit(ms, cfg, a0);

  EXPECT_TRUE(fit.factors.A.allFinite());
  EXPECT_TRUE(fit.factors.B.allFinite());
  // The trace records the raw misfit, so a ridged A-step may trade a tiny
  // objective increase for a smaller factor norm; the allowance reflects that.
  const double allowance = 1e-6 * std::max(1.0, fit.trace.front());
  for (std::size_t t = 1; t < fit.trace.size(); ++t) {
    EXPECT_LE(fit.trace[t], fit.trace[t - 1] + allowance);
  }
}

TEST(AlsFit, ValidatesConfigurationAndShapes) {
  const Matrix gradients = random_gaussian(103, 6, 20);
  const asketch::MeasurementSet ms = measure(gradients, 3, 107);
  const Matrix a0 = Matrix::Identity(6, 3);

  asketch::AlsConfig cfg;
  cfg.rank = 3;

  asketch::AlsConfig bad = cfg;
  bad.rank = 0;
  EXPECT_THROW(asketch::als_fit(ms, bad, a0), std::invalid_argument);
  bad.rank = 4;  // exceeds k = 3
  EXPECT_THROW(asketch::als_fit(ms, bad, Matrix::Identity(6, 4)), std::invalid_argument);
  bad = cfg;
  bad.max_iterations = 0;
  EXPECT_THROW(asketch::als_fit(ms, bad, a0), std::invalid_argument);
  bad = cfg;
  bad.tolerance = 0.0;
  EXPECT_THROW(asketch::als_fit(ms, bad, a0), std::invalid_argument);
  bad = cfg;
  bad.ridge = -1.0;
  EXPECT_THROW(asketch::als_fit(ms, bad, a0), std::invalid_argument);
  EXPECT_THROW(asketch::als_fit(ms, cfg, Matrix::Identity(5, 3)), std::invalid_argument);
}

TEST(SubspaceFromFactors, MatchesFullSvdOfProduct) {
  const Matrix a = random_gaussian(109, 12, 4);
  const Matrix b = random_gaussian(113, 30, 4);
  const asketch::LowRankFactors factors{a, b};

  const asketch::SubspaceResult sub = asketch::subspace_from_factors(factors, 3);
  ASSERT_EQ(sub.basis.cols(), 3);
  ASSERT_EQ(sub.singular_values.size(), 4);

  const Eigen::BDCSVD<Matrix> svd(a * b.transpose(), Eigen::ComputeThinU);
  EXPECT_LT((sub.singular_values - svd.singularValues().head(4)).cwiseAbs().maxCoeff(),
            1e-10 * svd.singularValues()[0]);
  EXPECT_LE(asketch::subspace_error(svd.matrixU().leftCols(3), sub.basis), 1e-10);

  // Column signs follow the shared convention.
  for (Eigen::Index j = 0; j < 3; ++j) {
    Eigen::Index idx = 0;
    sub.basis.col(j).cwiseAbs().maxCoeff(&idx);
    EXPECT_GT(sub.basis(idx, j), 0.0);
  }

  EXPECT_THROW(asketch::subspace_from_factors(factors, 5), std::invalid_argument);
  EXPECT_THROW(asketch::subspace_from_factors(factors, 0), std::invalid_argument);
}

TEST(ApplySignConvention, LargestMagnitudeEntryTurnsPositive) {
  Matrix cols(3, 2);
  cols.col(0) << 0.5, -2.0, 1.0;
  cols.col(1) << -0.5, 0.25, 0.25;
  asketch::apply_sign_convention(cols);
  EXPECT_DOUBLE_EQ(cols(1, 0), 2.0);   // flipped
  EXPECT_DOUBLE_EQ(cols(0, 1), 0.5);   // flipped
  EXPECT_DOUBLE_EQ(cols(0, 0), -0.5);  // rest of the flipped column
}

}  // namespace
