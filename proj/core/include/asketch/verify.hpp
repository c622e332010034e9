#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "asketch/harness.hpp"
#include "asketch/testfns.hpp"

namespace asketch {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  bool skipped = false;  // outside the preset selection; passed is true
  std::string details;
  double seconds = 0.0;
};

// Restricts the suite to the problem families a caller cares about; checks
// that touch none of the selected families are reported as skipped.
struct CheckSelection {
  bool quadratic = true;
  bool pde = true;
  bool zmodel = true;
};

// The ten acceptance checks with their pinned tolerances and runtime budgets.
// Expensive sweeps are computed once and shared across checks, so run the
// suite through a single instance.
class AcceptanceSuite {
public:
  static constexpr int kNumChecks = 10;

  explicit AcceptanceSuite(CheckSelection selection = {});

  // Runs one check (id in 1..kNumChecks) and reports outcome plus details.
  CheckResult run(int id);

  // Runs every check in order, invoking the callback (if any) after each.
  std::vector<CheckResult> run_all(const std::function<void(const CheckResult&)>& on_result = {});

private:
  const ExperimentResult& quadratic_run();
  const ExperimentResult& pde_run();
  const PoissonKLModel& pde_model();

  CheckSelection selection_;
  std::optional<ExperimentResult> quadratic_run_;
  std::optional<ExperimentResult> pde_run_;
  std::optional<PoissonKLModel> pde_model_;
};

// One-line rendering: "[ 3] PASS  name (12.3 s)  details".
std::string format_check_line(const CheckResult& result);

}  // namespace asketch
