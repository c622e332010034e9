#include "asketch/harness.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <thread>

#include "asketch/metrics.hpp"
#include "asketch/rng.hpp"
#include "asketch/testfns.hpp"

namespace asketch {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

Vector default_z_weights() {
  Vector w(3);
  w << 1.0, 0.7, 0.4;
  return w;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.m < 1) throw std::invalid_argument("run_experiment: m must be >= 1");
  if (cfg.samples < 1) throw std::invalid_argument("run_experiment: samples must be >= 1");
  if (cfg.trials < 1) throw std::invalid_argument("run_experiment: trials must be >= 1");
  if (cfg.threads < 1) throw std::invalid_argument("run_experiment: threads must be >= 1");
  const Eigen::Index r = cfg.als.rank;
  if (r < 1 || r > std::min(cfg.m, cfg.samples)) {
    throw std::invalid_argument("run_experiment: rank must satisfy 1 <= r <= min(m, M)");
  }
  for (Eigen::Index k : cfg.k_list) {
    if (k < r || k > cfg.m) {
      throw std::invalid_argument("run_experiment: every k must satisfy r <= k <= m");
    }
  }
  if (cfg.subspace_dim < 1 || cfg.subspace_dim > r) {
    throw std::invalid_argument("run_experiment: subspace dimension must satisfy 1 <= n <= r");
  }
  if (cfg.problem == ProblemKind::zmodel && cfg.measurement.mode == DiffMode::finite_difference) {
    throw std::invalid_argument(
        "run_experiment: finite-difference measurements need a function model; "
        "the synthetic z-model provides gradient samples only");
  }
  if (cfg.problem == ProblemKind::pde) {
    if (cfg.grid < 2) throw std::invalid_argument("run_experiment: pde grid must be >= 2");
    if (cfg.m > cfg.grid * cfg.grid) {
      throw std::invalid_argument("run_experiment: pde needs m <= grid^2 KL modes");
    }
  }
}

struct Problem {
  std::unique_ptr<FunctionModel> model;  // null for the z-model
  Matrix inputs;                         // m x M, empty for the z-model
  Matrix gradients;                      // m x M
};

Problem build_problem(const ExperimentConfig& cfg) {
  const std::uint64_t tag = hash_label(problem_name(cfg.problem));
  Problem out;
  if (cfg.problem == ProblemKind::zmodel) {
    const Vector weights = cfg.z_weights.size() > 0 ? cfg.z_weights : default_z_weights();
    const ZModelSpec spec = make_z_model(cfg.m, weights, cfg.problem_seed);
    out.gradients = sample_z_model(spec, cfg.samples,
                                   derive_seed(cfg.master_seed, {tag, hash_label("gradients")}));
    return out;
  }

  if (cfg.problem == ProblemKind::quadratic) {
    out.model = std::make_unique<QuadraticModel>(build_quadratic(cfg.m, 3, cfg.problem_seed));
  } else {
    out.model = std::make_unique<PoissonKLModel>(
        PoissonKLModel(cfg.grid, cfg.m, cfg.correlation_length));
  }
  out.inputs = sample_inputs(out.model->input_density(), cfg.samples,
                             derive_seed(cfg.master_seed, {tag, hash_label("inputs")}));
  out.gradients.resize(cfg.m, cfg.samples);
  for (Eigen::Index i = 0; i < cfg.samples; ++i) {
    out.gradients.col(i) = out.model->gradient(out.inputs.col(i));
  }
  return out;
}

// One (k, trial) cell: fresh sketches, measurements shared by both
// estimators, errors against the reference decomposition.
CellResult run_cell(const ExperimentConfig& cfg, const Problem& problem,
                    const EigenDecomposition& reference, Eigen::Index k, int trial) {
  const auto start = Clock::now();
  CellResult cell;
  cell.k = k;
  cell.trial = trial;
  cell.sketch_seed = derive_seed(
      cfg.master_seed, {hash_label(problem_name(cfg.problem)),
                        static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(trial)});

  const Eigen::Index m = cfg.m;
  const Eigen::Index count = cfg.samples;
  const Eigen::Index r = cfg.als.rank;
  const Eigen::Index detail_dims = std::min<Eigen::Index>(kDetailDims, m);
  const Vector reference_six = first_six(reference.eigenvalues);

  try {
    MeasurementSet ms;
    ms.sketches = draw_sketches(m, k, count, cell.sketch_seed);
    ms.measurements.resize(k, count);
    for (Eigen::Index i = 0; i < count; ++i) {
      const Matrix& e = ms.sketches.matrices[static_cast<std::size_t>(i)];
      if (cfg.measurement.mode == DiffMode::exact) {
        ms.measurements.col(i).noalias() = e.transpose() * problem.gradients.col(i);
      } else {
        ms.measurements.col(i) =
            measure_gradient(*problem.model, problem.inputs.col(i), e, cfg.measurement);
      }
    }

    const EigenDecomposition cp = estimate_c_projection(ms);
    cell.projection.eigenvalues = first_six(cp.eigenvalues);
    cell.projection.eigenvalue_error = eigenvalue_error(reference_six, cell.projection.eigenvalues);
    for (Eigen::Index j = 1; j <= detail_dims; ++j) {
      cell.projection.subspace_detail[static_cast<std::size_t>(j - 1)] =
          subspace_error(reference.eigenvectors.leftCols(j), cp.eigenvectors.leftCols(j));
    }
    cell.projection.subspace_error = subspace_error(
        reference.eigenvectors.leftCols(cfg.subspace_dim), cp.eigenvectors.leftCols(cfg.subspace_dim));

    const Matrix a0 = als_init(cp, r);
    const AlsResult fit = als_fit(ms, cfg.als, a0);
    cell.als_iterations = fit.iterations;
    cell.als_converged = fit.converged;
    cell.als_objective_first = fit.trace.front();
    cell.als_objective_final = fit.trace.back();
    cell.als_trace_max_increase = 0.0;
    for (std::size_t t = 1; t < fit.trace.size(); ++t) {
      cell.als_trace_max_increase =
          std::max(cell.als_trace_max_increase, fit.trace[t] - fit.trace[t - 1]);
    }

    const SubspaceResult main_subspace = subspace_from_factors(fit.factors, cfg.subspace_dim);
    cell.als.subspace_error =
        subspace_error(reference.eigenvectors.leftCols(cfg.subspace_dim), main_subspace.basis);
    cell.als.eigenvalues =
        first_six(Vector(main_subspace.singular_values.array().square() / static_cast<double>(count)));
    cell.als.eigenvalue_error = eigenvalue_error(reference_six, cell.als.eigenvalues);

    // Detail dimensions up to the fit rank come from the factors; dimensions
    // beyond it need the orthonormal completion from a full SVD of A B'
    // (their singular values vanish, so the directions carry no signal, but
    // the detail curves are still well-defined and deterministic).
    Matrix completion;
    if (detail_dims > r) {
      Eigen::BDCSVD<Matrix> svd(fit.factors.A * fit.factors.B.transpose(), Eigen::ComputeThinU);
      completion = svd.matrixU();
      apply_sign_convention(completion);
    }
    for (Eigen::Index j = 1; j <= detail_dims; ++j) {
      const Matrix basis = j <= r ? subspace_from_factors(fit.factors, j).basis
                                  : Matrix(completion.leftCols(j));
      cell.als.subspace_detail[static_cast<std::size_t>(j - 1)] =
          subspace_error(reference.eigenvectors.leftCols(j), basis);
    }
    cell.ok = true;
  } catch (const std::exception& e) {
    cell.ok = false;
    cell.failure = e.what();
  }
  cell.seconds = elapsed_seconds(start);
  return cell;
}

MethodSummary summarize_method(const std::vector<const MethodCellResult*>& cells) {
  MethodSummary out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (cells.empty()) {
    out.eigenvalue_error_mean = nan;
    out.subspace_error_mean = nan;
    out.subspace_detail_mean.fill(nan);
    return out;
  }
  const double inv = 1.0 / static_cast<double>(cells.size());
  for (const MethodCellResult* c : cells) {
    out.eigenvalue_error_mean += c->eigenvalue_error * inv;
    out.subspace_error_mean += c->subspace_error * inv;
    for (int j = 0; j < kDetailDims; ++j) {
      out.subspace_detail_mean[static_cast<std::size_t>(j)] +=
          c->subspace_detail[static_cast<std::size_t>(j)] * inv;
    }
  }
  return out;
}

}  // namespace

std::string problem_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::quadratic: return "quadratic";
    case ProblemKind::pde: return "pde";
    case ProblemKind::zmodel: return "zmodel";
  }
  throw std::invalid_argument("problem_name: unknown problem kind");
}

ExperimentConfig quadratic_preset() {
  ExperimentConfig cfg;
  cfg.problem = ProblemKind::quadratic;
  cfg.m = 10;
  cfg.samples = 200;
  cfg.k_list = {4, 5, 6, 7, 8, 9};
  cfg.als.rank = 4;
  cfg.subspace_dim = 3;
  cfg.trials = 20;
  return cfg;
}

ExperimentConfig pde_preset() {
  ExperimentConfig cfg;
  cfg.problem = ProblemKind::pde;
  cfg.m = 100;
  cfg.samples = 300;
  cfg.k_list = {10, 30, 50, 70, 90};
  cfg.als.rank = 8;
  cfg.subspace_dim = 1;
  cfg.trials = 20;
  cfg.grid = 32;
  cfg.correlation_length = 1.0;
  return cfg;
}

ExperimentConfig zmodel_preset() {
  ExperimentConfig cfg;
  cfg.problem = ProblemKind::zmodel;
  cfg.m = 10;
  cfg.samples = 10000;
  cfg.k_list = {5};
  cfg.als.rank = 3;
  cfg.subspace_dim = 3;
  cfg.trials = 10;
  cfg.z_weights = default_z_weights();
  return cfg;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto start = Clock::now();

  ExperimentResult out;
  out.config = cfg;

  const Problem problem = build_problem(cfg);
  const EigenDecomposition reference = estimate_c_monte_carlo(problem.gradients);
  out.reference_eigenvalues = reference.eigenvalues;
  out.reference_seconds = elapsed_seconds(start);

  const std::size_t n_cells = cfg.k_list.size() * static_cast<std::size_t>(cfg.trials);
  out.cells.resize(n_cells);

  auto run_flat = [&](std::size_t flat) {
    const Eigen::Index k = cfg.k_list[flat / static_cast<std::size_t>(cfg.trials)];
    const int trial = static_cast<int>(flat % static_cast<std::size_t>(cfg.trials));
    out.cells[flat] = run_cell(cfg, problem, reference, k, trial);
  };

  const int workers = std::min<int>(cfg.threads, static_cast<int>(std::max<std::size_t>(n_cells, 1)));
  if (workers <= 1) {
    for (std::size_t flat = 0; flat < n_cells; ++flat) run_flat(flat);
  } else {
    // Cells are independent and each writes only its own slot, so any
    // scheduling yields the same result vector.
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t flat = next.fetch_add(1); flat < n_cells; flat = next.fetch_add(1)) {
          run_flat(flat);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  out.summaries.reserve(cfg.k_list.size());
  for (std::size_t ki = 0; ki < cfg.k_list.size(); ++ki) {
    KSummary summary;
    summary.k = cfg.k_list[ki];
    std::vector<const MethodCellResult*> proj_cells;
    std::vector<const MethodCellResult*> als_cells;
    for (int t = 0; t < cfg.trials; ++t) {
      const CellResult& cell = out.cells[ki * static_cast<std::size_t>(cfg.trials) +
                                         static_cast<std::size_t>(t)];
      if (!cell.ok) continue;
      proj_cells.push_back(&cell.projection);
      als_cells.push_back(&cell.als);
    }
    summary.successes = static_cast<int>(proj_cells.size());
    summary.projection = summarize_method(proj_cells);
    summary.als = summarize_method(als_cells);
    out.summaries.push_back(std::move(summary));
  }

  out.total_seconds = elapsed_seconds(start);
  return out;
}

}  // namespace asketch
