#pragma once

#include <cstdint>

#include "asketch/common.hpp"

namespace asketch {

// Input distribution a model's parameters are drawn from.
enum class DensityKind {
  uniform_hypercube,  // iid U(-1, 1) per coordinate
  standard_gaussian,  // iid N(0, 1) per coordinate
};

struct InputDensity {
  DensityKind kind = DensityKind::uniform_hypercube;
  Eigen::Index dim = 0;
};

// Scalar function f : R^m -> R with an optional exact gradient.  Models are
// deterministic: evaluate/gradient depend only on x.
class FunctionModel {
public:
  virtual ~FunctionModel() = default;

  virtual Eigen::Index dim() const = 0;
  virtual double evaluate(const Vector& x) const = 0;
  virtual InputDensity input_density() const = 0;

  virtual bool has_gradient() const { return false; }
  // Throws capability_error unless has_gradient().
  virtual Vector gradient(const Vector& x) const;
};

// How directional derivatives are obtained from a model.
enum class DiffMode {
  exact,              // gradient(x) dotted with the direction
  finite_difference,  // forward difference (f(x+ha) - f(x)) / h
};

struct MeasurementConfig {
  DiffMode mode = DiffMode::exact;
  // Forward-difference step; values <= 0 select 1e-6 * max(1, |x|_inf) at the
  // evaluation point.
  double step = 0.0;
};

// Draw `count` iid samples from the density, one per column (m x count).
// Deterministic given seed.
Matrix sample_inputs(const InputDensity& density, Eigen::Index count, std::uint64_t seed);

// a' grad f(x), either exactly or by forward difference (two evaluations).
double directional_derivative(const FunctionModel& model, const Vector& x,
                              const Vector& a, const MeasurementConfig& config = {});

// k-vector of directional derivatives along the columns of the m x k sketch.
// Exact mode evaluates the gradient once; finite-difference mode evaluates f
// at the base point once and once per column, k+1 evaluations total.
Vector measure_gradient(const FunctionModel& model, const Vector& x,
                        const Matrix& sketch, const MeasurementConfig& config = {});

}  // namespace asketch
