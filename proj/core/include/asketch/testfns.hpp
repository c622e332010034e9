#pragma once

#include <cstdint>

#include "asketch/common.hpp"
#include "asketch/estimators.hpp"
#include "asketch/model.hpp"

namespace asketch {

// f(x) = 1/2 x'Hx on the uniform density over [-1,1]^m.  The gradient
// covariance C then has eigenvalues eig(H)^2 / 3 with the eigenvectors of H,
// which makes every estimator testable against an analytic truth.
class QuadraticModel final : public FunctionModel {
public:
  explicit QuadraticModel(Matrix hessian);

  Eigen::Index dim() const override { return hessian_.rows(); }
  double evaluate(const Vector& x) const override;
  bool has_gradient() const override { return true; }
  Vector gradient(const Vector& x) const override;
  InputDensity input_density() const override {
    return {DensityKind::uniform_hypercube, dim()};
  }

  const Matrix& hessian() const { return hessian_; }
  // Cached decomposition of H, the oracle behind the analytic C spectrum.
  const EigenDecomposition& hessian_eig() const { return eig_; }

private:
  Matrix hessian_;
  EigenDecomposition eig_;
};

// H = Q D Q' with a seeded random orthogonal Q and eigenvalues decaying a
// quarter decade per index, broken by a 10^{2.5} drop after `gap_after`
// (so the C spectrum has a 10^5 gap there).
QuadraticModel build_quadratic(Eigen::Index m = 10, Eigen::Index gap_after = 3,
                               std::uint64_t seed = 0);

struct SubspaceTruth {
  Matrix basis;       // m x n, eigenvectors of H
  Vector eigenvalues; // length m, analytic C eigenvalues eig(H)^2 / 3
};

// Analytic active subspace of the quadratic model under the uniform density
// (coordinate second moment 1/3).
SubspaceTruth quadratic_true_active_subspace(const QuadraticModel& model, Eigen::Index n = 3);

// Synthetic gradient distribution z = sum_j w_j sigma_j v_j with iid standard
// Gaussian weights: a planted d-dimensional subspace with known directions,
// used for estimator consistency tests.  There is no underlying f.
struct ZModelSpec {
  Matrix directions;  // m x d, orthonormal columns
  Vector weights;     // length d, positive, descending
};

// Validates the spec fields (orthonormal directions, positive descending weights).
void check_z_model(const ZModelSpec& spec);

// ZModelSpec with seeded random orthonormal directions.
ZModelSpec make_z_model(Eigen::Index m, const Vector& weights, std::uint64_t seed);

// m x count matrix of iid z-model samples.
Matrix sample_z_model(const ZModelSpec& spec, Eigen::Index count, std::uint64_t seed);

// Scalar diffusion problem -div(a grad u) = forcing on the unit square,
// discretized by a cell-centered 5-point scheme on an N x N grid with
// homogeneous Dirichlet conditions on the left/bottom/top edges and a no-flux
// (Neumann) condition on the right edge.  The log-coefficient is a truncated
// Karhunen-Loeve expansion of a Gaussian field with exponential covariance:
// log a(s, x) = sum_j sqrt(gamma_j) phi_j(s) x_j, x ~ N(0, I_m).  The
// quantity of interest f(x) is the mean of u over the right-edge cells; its
// gradient comes from one extra (adjoint) solve with the same symmetric
// operator.  Solves factor the sparse operator per call, so evaluation and
// gradient calls are pure and safe to run concurrently.
class PoissonKLModel final : public FunctionModel {
public:
  PoissonKLModel(Eigen::Index grid, Eigen::Index modes, double correlation_length,
                 double forcing = 1.0);

  Eigen::Index dim() const override { return gamma_.size(); }
  double evaluate(const Vector& x) const override;
  bool has_gradient() const override { return true; }
  Vector gradient(const Vector& x) const override;
  InputDensity input_density() const override {
    return {DensityKind::standard_gaussian, dim()};
  }

  Eigen::Index grid_size() const { return grid_; }
  double correlation_length() const { return correlation_length_; }
  double forcing() const { return forcing_; }
  void set_forcing(double value) { forcing_ = value; }

  // KL weights gamma_j (positive, descending) and mode fields phi_j evaluated
  // at the cell centers (grid^2 x m, orthonormal columns).
  const Vector& kl_eigenvalues() const { return gamma_; }
  const Matrix& kl_modes() const { return modes_; }

  // Coefficient field a(., x) = exp(sum_j sqrt(gamma_j) phi_j x_j) at the
  // cell centers (length grid^2, cell p = iy*grid + ix).
  Vector coefficient_field(const Vector& x) const;

private:
  Eigen::Index grid_ = 0;
  double correlation_length_ = 1.0;
  double forcing_ = 1.0;
  Vector gamma_;        // length m
  Matrix modes_;        // grid^2 x m
  Matrix scaled_modes_; // grid^2 x m, column j = sqrt(gamma_j) * phi_j
};

// Builds the KL basis (dense covariance eigendecomposition at grid
// resolution) and the solver machinery.  Deterministic: the exponential
// kernel exp(-|s - s'| / l) on the fixed cell-center grid has no sampled
// ingredients.
PoissonKLModel build_poisson_kl(Eigen::Index grid = 32, Eigen::Index modes = 100,
                                double correlation_length = 1.0);

// f(x): assemble K(x), solve K u = forcing, average u over the right edge.
double poisson_eval(const PoissonKLModel& model, const Vector& x);

// Adjoint gradient of f: solve K v = c and accumulate -v' (dK/dx_j) u.
Vector poisson_grad(const PoissonKLModel& model, const Vector& x);

}  // namespace asketch
