#pragma once

#include <cstdint>
#include <vector>

#include "asketch/common.hpp"

namespace asketch {

// M random sketch matrices, all m x k, plus the seed they were drawn from so
// a run can be replayed exactly.
struct SketchSet {
  std::vector<Matrix> matrices;
  std::uint64_t seed = 0;
};

// Sketches paired with the measured k-vectors m_i = E_i' grad f_i (column i
// of `measurements`).  The estimators consume gradients only through this.
struct MeasurementSet {
  SketchSet sketches;
  Matrix measurements;  // k x M

  Eigen::Index dim() const { return sketches.matrices.empty() ? 0 : sketches.matrices.front().rows(); }
  Eigen::Index measurements_per_sample() const {
    return sketches.matrices.empty() ? 0 : sketches.matrices.front().cols();
  }
  Eigen::Index count() const { return static_cast<Eigen::Index>(sketches.matrices.size()); }
};

// Symmetric eigendecomposition with eigenvalues sorted descending and the
// sign of each eigenvector fixed (largest-magnitude entry positive).
struct EigenDecomposition {
  Vector eigenvalues;   // length m, descending
  Matrix eigenvectors;  // m x m, column i pairs with eigenvalues[i]
};

// Rank-r factors of the fitted gradient matrix, A B' ~ G (A: m x r, B: M x r).
struct LowRankFactors {
  Matrix A;
  Matrix B;
};

struct AlsConfig {
  Eigen::Index rank = 1;
  int max_iterations = 200;
  double tolerance = 1e-8;  // stop when the objective change per iteration
                            // drops below tolerance * ||measurements||_F
  double ridge = 0.0;       // Tikhonov term for the A-step normal equations
};

struct AlsResult {
  LowRankFactors factors;
  // Objective ||m_i - E_i'A b_i|| stacked over i, recorded after every
  // half-step (B-step, then A-step), so trace.size() == 2 * iterations.
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

// Orthonormal basis of the dominant left singular subspace of A B', plus all
// r singular values (sigma_j^2 / M are the rank-based eigenvalue estimates).
struct SubspaceResult {
  Matrix basis;            // m x n
  Vector singular_values;  // length r, descending
};

// Flip each column's sign so its largest-magnitude entry (first such index on
// ties) is positive.  Shared convention for eigenvectors and singular vectors.
void apply_sign_convention(Matrix& columns);

// Eigendecomposition of (C + C')/2 with descending eigenvalues.
EigenDecomposition sym_eig(const Matrix& c);

// Eigendecomposition of (1/M) sum_i g_i g_i' for an m x M gradient matrix.
EigenDecomposition estimate_c_monte_carlo(const Matrix& gradients);

// M independent m x k standard Gaussian sketch matrices.
SketchSet draw_sketches(Eigen::Index m, Eigen::Index k, Eigen::Index count, std::uint64_t seed);

// E (E'E)^{-1} m_vec: the vector in range(E) whose measurement under E is
// m_vec; the orthogonal projection of z when m_vec = E'z.
Vector project_measurement(const Matrix& sketch, const Vector& m_vec);

// Eigendecomposition of (1/M) sum_i p_i p_i' with p_i the projected
// measurements.  Eigenvector estimates are consistent for planted-subspace
// data; eigenvalue magnitudes are biased by the projection and reported as-is.
EigenDecomposition estimate_c_projection(const MeasurementSet& ms);

// First r eigenvectors scaled by the square roots of the first r eigenvalues
// (tiny negative eigenvalues clamped to zero).
Matrix als_init(const EigenDecomposition& cp, Eigen::Index rank);

// Alternating least squares for min_{A,B} sum_i ||m_i - E_i' A b_i||^2
// starting from A0.  B-step: per-i minimum-norm least squares.  A-step: joint
// normal equations sum_i (b_i b_i' (x) E_i E_i') vec(A) = sum_i vec(E_i m_i b_i'),
// optionally ridge-regularized.
AlsResult als_fit(const MeasurementSet& ms, const AlsConfig& cfg, const Matrix& a0);

// First n left singular vectors of A B' plus all r singular values.
SubspaceResult subspace_from_factors(const LowRankFactors& factors, Eigen::Index n);

}  // namespace asketch
