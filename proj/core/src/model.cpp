#include "asketch/model.hpp"

#include "asketch/rng.hpp"

namespace asketch {

namespace {

double fd_step(const MeasurementConfig& config, const Vector& x) {
  if (config.step > 0.0) return config.step;
  return 1e-6 * std::max(1.0, x.lpNorm<Eigen::Infinity>());
}

}  // namespace

Vector FunctionModel::gradient(const Vector&) const {
  throw capability_error("model does not provide an exact gradient");
}

Matrix sample_inputs(const InputDensity& density, Eigen::Index count, std::uint64_t seed) {
  if (density.dim < 1) throw std::invalid_argument("sample_inputs: density dim must be >= 1");
  if (count < 1) throw std::invalid_argument("sample_inputs: count must be >= 1");
  std::mt19937_64 gen(seed);
  switch (density.kind) {
    case DensityKind::uniform_hypercube:
      return uniform_matrix(gen, density.dim, count, -1.0, 1.0);
    case DensityKind::standard_gaussian:
      return gaussian_matrix(gen, density.dim, count);
  }
  throw std::invalid_argument("sample_inputs: unknown density kind");
}

double directional_derivative(const FunctionModel& model, const Vector& x,
                              const Vector& a, const MeasurementConfig& config) {
  if (x.size() != model.dim()) throw std::invalid_argument("directional_derivative: x has wrong length");
  if (a.size() != model.dim()) throw std::invalid_argument("directional_derivative: direction has wrong length");
  if (config.mode == DiffMode::exact) {
    return model.gradient(x).dot(a);
  }
  const double h = fd_step(config, x);
  return (model.evaluate(x + h * a) - model.evaluate(x)) / h;
}

Vector measure_gradient(const FunctionModel& model, const Vector& x,
                        const Matrix& sketch, const MeasurementConfig& config) {
  if (x.size() != model.dim()) throw std::invalid_argument("measure_gradient: x has wrong length");
  if (sketch.rows() != model.dim()) throw std::invalid_argument("measure_gradient: sketch must have m rows");
  if (config.mode == DiffMode::exact) {
    return sketch.transpose() * model.gradient(x);
  }
  const double h = fd_step(config, x);
  const double base = model.evaluate(x);  // shared across all k directions
  Vector out(sketch.cols());
  for (Eigen::Index j = 0; j < sketch.cols(); ++j) {
    out[j] = (model.evaluate(x + h * sketch.col(j)) - base) / h;
  }
  return out;
}

}  // namespace asketch
