#include <cstdio>
#include <fstream>
#include <string>

#include "json.hpp"

#include "asketch/harness.hpp"

namespace asketch {

namespace {

using nlohmann::json;

// Shortest exact decimal form; reruns of the same experiment must produce
// byte-identical files, so no locale- or stream-state-dependent formatting.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt(Eigen::Index v) { return std::to_string(static_cast<long long>(v)); }

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

template <std::size_t N>
json to_json(const std::array<double, N>& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

json method_cell_json(const MethodCellResult& m) {
  return json{{"eigenvalue_error", m.eigenvalue_error},
              {"subspace_error", m.subspace_error},
              {"subspace_detail", to_json(m.subspace_detail)},
              {"eigenvalues", to_json(m.eigenvalues)}};
}

json method_summary_json(const MethodSummary& m) {
  return json{{"eigenvalue_error_mean", m.eigenvalue_error_mean},
              {"subspace_error_mean", m.subspace_error_mean},
              {"subspace_detail_mean", to_json(m.subspace_detail_mean)}};
}

json config_json(const ExperimentConfig& cfg) {
  json k_list = json::array();
  for (Eigen::Index k : cfg.k_list) k_list.push_back(static_cast<std::int64_t>(k));
  json out{{"problem", problem_name(cfg.problem)},
           {"m", static_cast<std::int64_t>(cfg.m)},
           {"samples", static_cast<std::int64_t>(cfg.samples)},
           {"k_list", k_list},
           {"rank", static_cast<std::int64_t>(cfg.als.rank)},
           {"subspace_dim", static_cast<std::int64_t>(cfg.subspace_dim)},
           {"trials", cfg.trials},
           {"mode", cfg.measurement.mode == DiffMode::exact ? "exact" : "fd"},
           {"fd_step", cfg.measurement.step},
           {"master_seed", cfg.master_seed},
           {"problem_seed", cfg.problem_seed},
           {"als",
            json{{"max_iterations", cfg.als.max_iterations},
                 {"tolerance", cfg.als.tolerance},
                 {"ridge", cfg.als.ridge}}},
           {"threads", cfg.threads}};
  if (cfg.problem == ProblemKind::pde) {
    out["grid"] = static_cast<std::int64_t>(cfg.grid);
    out["correlation_length"] = cfg.correlation_length;
  }
  if (cfg.problem == ProblemKind::zmodel) {
    out["z_weights"] = to_json(cfg.z_weights);
  }
  return out;
}

}  // namespace

std::string render_csv(const ExperimentResult& result) {
  std::string out =
      "problem,method,k,r,n,trials,eigenvalue_error_mean,subspace_error_mean,"
      "subspace_err_n1_mean,subspace_err_n2_mean,subspace_err_n3_mean,"
      "subspace_err_n4_mean,subspace_err_n5_mean,subspace_err_n6_mean\n";
  const ExperimentConfig& cfg = result.config;
  const std::string prefix_tail =
      "," + fmt(cfg.als.rank) + "," + fmt(cfg.subspace_dim) + "," + std::to_string(cfg.trials);
  for (const KSummary& s : result.summaries) {
    for (const bool projection : {true, false}) {
      const MethodSummary& ms = projection ? s.projection : s.als;
      out += problem_name(cfg.problem) + (projection ? ",projection," : ",als,") + fmt(s.k) + prefix_tail;
      out += "," + fmt(ms.eigenvalue_error_mean) + "," + fmt(ms.subspace_error_mean);
      for (double d : ms.subspace_detail_mean) out += "," + fmt(d);
      out += "\n";
    }
  }
  return out;
}

std::string render_json(const ExperimentResult& result) {
  json cells = json::array();
  for (const CellResult& c : result.cells) {
    json cell{{"k", static_cast<std::int64_t>(c.k)},
              {"trial", c.trial},
              {"sketch_seed", c.sketch_seed},
              {"ok", c.ok},
              {"seconds", c.seconds}};
    if (c.ok) {
      cell["projection"] = method_cell_json(c.projection);
      json als = method_cell_json(c.als);
      als["iterations"] = c.als_iterations;
      als["converged"] = c.als_converged;
      als["objective_first"] = c.als_objective_first;
      als["objective_final"] = c.als_objective_final;
      als["trace_max_increase"] = c.als_trace_max_increase;
      cell["als"] = als;
    } else {
      cell["failure"] = c.failure;
    }
    cells.push_back(std::move(cell));
  }

  json summaries = json::array();
  for (const KSummary& s : result.summaries) {
    summaries.push_back(json{{"k", static_cast<std::int64_t>(s.k)},
                             {"successes", s.successes},
                             {"projection", method_summary_json(s.projection)},
                             {"als", method_summary_json(s.als)}});
  }

  const json doc{{"config", config_json(result.config)},
                 {"reference",
                  json{{"eigenvalues", to_json(result.reference_eigenvalues)},
                       {"seconds", result.reference_seconds}}},
                 {"cells", cells},
                 {"summaries", summaries},
                 {"total_seconds", result.total_seconds}};
  return doc.dump(2) + "\n";
}

void emit_results(const ExperimentResult& result, OutputFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_results: cannot open " + path + " for writing");
  out << (format == OutputFormat::csv ? render_csv(result) : render_json(result));
  out.flush();
  if (!out) throw std::runtime_error("emit_results: failed writing " + path);
}

}  // namespace asketch
