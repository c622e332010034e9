// Microbenchmarks for the hot paths: the two C estimators at PDE scale, one
// ALS fit at each preset's shape, and the primitives they are built from.

#include <random>

#include <benchmark/benchmark.h>

#include "asketch/estimators.hpp"
#include "asketch/rng.hpp"
#include "asketch/testfns.hpp"

namespace {

using asketch::Matrix;
using asketch::Vector;

Matrix random_gaussian(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols) {
  std::mt19937_64 gen(seed);
  return asketch::gaussian_matrix(gen, rows, cols);
}

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

void BM_SymEig(benchmark::State& state) {
  const Eigen::Index m = state.range(0);
  const Matrix g = random_gaussian(1, m, m);
  const Matrix s = g + g.transpose();
  for (auto _ : state) {
    benchmark::DoNotOptimize(asketch::sym_eig(s));
  }
}
BENCHMARK(BM_SymEig)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_EstimateCMonteCarlo(benchmark::State& state) {
  const Matrix gradients = random_gaussian(2, 100, 300);
  for (auto _ : state) {
    benchmark::DoNotOptimize(asketch::estimate_c_monte_carlo(gradients));
  }
}
BENCHMARK(BM_EstimateCMonteCarlo)->Unit(benchmark::kMicrosecond);

void BM_ProjectMeasurement(benchmark::State& state) {
  const Matrix sketch = random_gaussian(3, 100, state.range(0));
  const Vector z = random_gaussian(4, 100, 1);
  const Vector m_vec = sketch.transpose() * z;
  for (auto _ : state) {
    benchmark::DoNotOptimize(asketch::project_measurement(sketch, m_vec));
  }
}
BENCHMARK(BM_ProjectMeasurement)->Arg(10)->Arg(50)->Arg(90)->Unit(benchmark::kMicrosecond);

void BM_EstimateCProjection(benchmark::State& state) {
  const Matrix gradients = random_gaussian(5, 100, 300);
  const asketch::MeasurementSet ms = measure(gradients, state.range(0), 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(asketch::estimate_c_projection(ms));
  }
}
BENCHMARK(BM_EstimateCProjection)->Arg(10)->Arg(50)->Arg(90)->Unit(benchmark::kMillisecond);

// ALS at the quadratic preset's shape (m=10, M=200, k=7, r=4).
void BM_AlsFitQuadraticShape(benchmark::State& state) {
  const asketch::QuadraticModel model = asketch::build_quadratic();
  const Matrix x = asketch::sample_inputs(model.input_density(), 200, 11);
  Matrix gradients(10, 200);
  for (Eigen::Index i = 0; i < 200; ++i) gradients.col(i) = model.gradient(x.col(i));
  const asketch::MeasurementSet ms = measure(gradients, 7, 12);

  asketch::AlsConfig cfg;
  cfg.rank = 4;
  const Matrix a0 = asketch::als_init(asketch::estimate_c_projection(ms), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(asketch::als_fit(ms, cfg, a0));
  }
}
BENCHMARK(BM_AlsFitQuadraticShape)->Unit(benchmark::kMillisecond);

// ALS at the PDE preset's most expensive shape (m=100, M=300, k=90, r=8),
// planted low-rank data so iteration counts stay representative but bounded.
void BM_AlsFitPdeShape(benchmark::State& state) {
  const Matrix gradients = random_gaussian(13, 100, 8) * random_gaussian(14, 300, 8).transpose();
  const asketch::MeasurementSet ms = measure(gradients, 90, 15);

  asketch::AlsConfig cfg;
  cfg.rank = 8;
  const Matrix a0 = asketch::als_init(asketch::estimate_c_projection(ms), 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(asketch::als_fit(ms, cfg, a0));
  }
}
BENCHMARK(BM_AlsFitPdeShape)->Unit(benchmark::kMillisecond);

void BM_PoissonGradient(benchmark::State& state) {
  const asketch::PoissonKLModel model = asketch::build_poisson_kl(32, 100, 1.0);
  const Vector x = asketch::sample_inputs(model.input_density(), 1, 16).col(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.gradient(x));
  }
}
BENCHMARK(BM_PoissonGradient)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
