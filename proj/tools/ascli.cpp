#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "asketch/harness.hpp"
#include "asketch/verify.hpp"

namespace {

asketch::ExperimentConfig preset_by_name(const std::string& name) {
  if (name == "quadratic") return asketch::quadratic_preset();
  if (name == "pde") return asketch::pde_preset();
  return asketch::zmodel_preset();
}

void print_summary(const asketch::ExperimentResult& result) {
  std::printf("problem %s: m=%lld M=%lld r=%lld n=%lld trials=%d\n",
              asketch::problem_name(result.config.problem).c_str(),
              static_cast<long long>(result.config.m),
              static_cast<long long>(result.config.samples),
              static_cast<long long>(result.config.als.rank),
              static_cast<long long>(result.config.subspace_dim), result.config.trials);
  std::printf("%6s %12s %12s %10s\n", "k", "proj_sub_err", "als_sub_err", "successes");
  for (const asketch::KSummary& s : result.summaries) {
    std::printf("%6lld %12.4e %12.4e %7d/%d\n", static_cast<long long>(s.k),
                s.projection.subspace_error_mean, s.als.subspace_error_mean, s.successes,
                result.config.trials);
  }
  std::printf("total %.2f s (reference %.2f s)\n", result.total_seconds, result.reference_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"active-subspace estimation from sketched gradient measurements"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");  // frees -h / --h for the fd step option

  auto* run = app.add_subcommand("run", "run an experiment sweep and write plot-ready results");
  run->set_help_flag("--help", "print help");
  std::string preset, out_dir, mode = "exact", format = "csv";
  long long trials = 0, rank = 0, subspace_dim = 0, threads = 0;
  std::uint64_t seed = 0;
  double step = 0.0;
  std::vector<long long> k_list;
  run->add_option("--preset", preset, "experiment preset: quadratic, pde or zmodel")
      ->required()
      ->check(CLI::IsMember({"quadratic", "pde", "zmodel"}));
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--trials", trials, "independent sketch trials per k");
  run->add_option("--seed", seed, "master seed");
  run->add_option("--k", k_list, "comma-separated list of measurement counts")->delimiter(',');
  run->add_option("--rank", rank, "fit rank r");
  run->add_option("--n", subspace_dim, "subspace dimension for the headline error");
  run->add_option("--mode", mode, "gradient measurement mode")
      ->check(CLI::IsMember({"exact", "fd"}));
  run->add_option("--h", step, "finite-difference step (fd mode; <= 0 picks a scaled default)");
  run->add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--threads", threads, "worker threads over (k, trial) cells");
  run->set_config("--config", "",
                  "plain key=value file with the same fields; command-line flags win");

  auto* verify = app.add_subcommand("verify", "run the acceptance checks");
  std::string verify_preset;
  verify->add_option("--preset", verify_preset, "restrict checks to one problem family")
      ->check(CLI::IsMember({"quadratic", "pde", "zmodel"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      asketch::ExperimentConfig cfg = preset_by_name(preset);
      if (run->count("--trials")) cfg.trials = static_cast<int>(trials);
      if (run->count("--seed")) cfg.master_seed = seed;
      if (run->count("--k")) cfg.k_list.assign(k_list.begin(), k_list.end());
      if (run->count("--rank")) cfg.als.rank = rank;
      if (run->count("--n")) cfg.subspace_dim = subspace_dim;
      if (run->count("--mode")) {
        cfg.measurement.mode =
            mode == "fd" ? asketch::DiffMode::finite_difference : asketch::DiffMode::exact;
      }
      if (run->count("--h")) cfg.measurement.step = step;
      if (run->count("--threads")) cfg.threads = static_cast<int>(threads);

      const asketch::ExperimentResult result = asketch::run_experiment(cfg);

      std::filesystem::create_directories(out_dir);
      const bool json = format == "json";
      const std::string file = asketch::problem_name(cfg.problem) + (json ? ".json" : ".csv");
      const std::string path = (std::filesystem::path(out_dir) / file).string();
      asketch::emit_results(
          result, json ? asketch::OutputFormat::json : asketch::OutputFormat::csv, path);

      print_summary(result);
      std::printf("wrote %s\n", path.c_str());
      return 0;
    }

    asketch::CheckSelection sel;
    if (!verify_preset.empty()) {
      sel = {false, false, false};
      if (verify_preset == "quadratic") sel.quadratic = true;
      if (verify_preset == "pde") sel.pde = true;
      if (verify_preset == "zmodel") sel.zmodel = true;
    }
    asketch::AcceptanceSuite suite(sel);
    bool all_passed = true;
    suite.run_all([&](const asketch::CheckResult& r) {
      std::cout << asketch::format_check_line(r) << std::endl;
      all_passed = all_passed && r.passed;
    });
    std::cout << (all_passed ? "acceptance: PASS" : "acceptance: FAIL") << std::endl;
    return all_passed ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
