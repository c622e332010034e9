#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "asketch/common.hpp"
#include "asketch/estimators.hpp"
#include "asketch/model.hpp"

namespace asketch {

enum class ProblemKind { quadratic, pde, zmodel };

std::string problem_name(ProblemKind kind);

// Full description of one sweep: the problem, the measurement counts to scan,
// how many independent sketch trials to average, and all seeds.  Identical
// configs (including master_seed) produce bit-identical result files.
struct ExperimentConfig {
  ProblemKind problem = ProblemKind::quadratic;
  Eigen::Index m = 10;                  // parameter dimension
  Eigen::Index samples = 200;           // M gradient samples
  std::vector<Eigen::Index> k_list;     // measurements per gradient, swept
  Eigen::Index subspace_dim = 3;        // n for the headline subspace error
  int trials = 20;                      // independent sketch draws per k
  MeasurementConfig measurement;        // exact or finite-difference
  std::uint64_t master_seed = 10;
  AlsConfig als;                        // als.rank is the experiment rank r
  int threads = 1;                      // worker threads over (k, trial) cells

  // Problem structure knobs.
  std::uint64_t problem_seed = 7;       // quadratic rotation / z-model directions
  Eigen::Index grid = 32;               // pde mesh (grid x grid cells)
  double correlation_length = 1.0;      // pde KL kernel length scale
  Vector z_weights;                     // z-model sigmas; empty = (1, 0.7, 0.4)
};

ExperimentConfig quadratic_preset();  // m=10,  M=200,   k=4..9,            r=4, n=3, T=20
ExperimentConfig pde_preset();        // m=100, M=300,   k=10,30,50,70,90,  r=8, n=1, T=20
ExperimentConfig zmodel_preset();     // m=10,  M=10000, k=5,               r=3, n=3, T=10

// Subspace errors are also recorded at dimensions 1..6 (the fixed-k detail
// curves), independent of the headline dimension n.
constexpr int kDetailDims = 6;

struct MethodCellResult {
  double eigenvalue_error = 0.0;
  double subspace_error = 0.0;  // at dimension n
  std::array<double, kDetailDims> subspace_detail{};
  Vector eigenvalues;           // first six estimates, zero-padded
};

struct CellResult {
  Eigen::Index k = 0;
  int trial = 0;
  std::uint64_t sketch_seed = 0;
  bool ok = false;
  std::string failure;  // reason when !ok; the sweep itself continues
  MethodCellResult projection;
  MethodCellResult als;
  int als_iterations = 0;
  bool als_converged = false;
  double als_objective_first = 0.0;
  double als_objective_final = 0.0;
  double als_trace_max_increase = 0.0;  // > 0 would violate monotonicity
  double seconds = 0.0;
};

struct MethodSummary {
  double eigenvalue_error_mean = 0.0;
  double subspace_error_mean = 0.0;
  std::array<double, kDetailDims> subspace_detail_mean{};
};

// Trial means for one k, taken over the successful cells (NaN when none).
struct KSummary {
  Eigen::Index k = 0;
  int successes = 0;
  MethodSummary projection;
  MethodSummary als;
};

struct ExperimentResult {
  ExperimentConfig config;
  Vector reference_eigenvalues;   // spectrum of the reference C-hat
  std::vector<CellResult> cells;  // k-major, trial-minor order
  std::vector<KSummary> summaries;
  double reference_seconds = 0.0;
  double total_seconds = 0.0;
};

// Runs the full sweep: reference C-hat from exact gradients once, then for
// every (k, trial) cell fresh sketches, shared measurements, both estimators,
// and errors against the reference.  A failing cell is recorded with its
// reason and the sweep continues.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

enum class OutputFormat { csv, json };

// Plot-ready summary table, one row per (k, method); numbers printed with
// "%.17g" so reruns are byte-comparable.
std::string render_csv(const ExperimentResult& result);

// Full per-trial structure, including every seed needed for exact replay.
std::string render_json(const ExperimentResult& result);

// Writes the rendered output to `path` (throws std::runtime_error on I/O failure).
void emit_results(const ExperimentResult& result, OutputFormat format, const std::string& path);

}  // namespace asketch
