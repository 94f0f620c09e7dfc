#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "nlpf/stepper.hpp"

namespace nlpf {

/// One named pass/fail check with its measured value.
struct ThresholdCheck {
  std::string name;
  double value = 0.0;
  std::string expected;
  bool pass = false;
};

/// One line per check: PASS/FAIL, name, value, expectation.
std::string format_checks(const std::vector<ThresholdCheck>& checks);
nlohmann::json to_json(const ThresholdCheck& c);

nlohmann::json to_json(const InterfaceReport& r);
nlohmann::json to_json(const StepDiagnostics& d);
nlohmann::json to_json(const InvariantSummary& s);

/// Resolved configuration: the inputs plus the grid actually used (snapped
/// h, cell count, layer) and the derived kernel constants.
nlohmann::json resolved_config_json(const Simulation& sim);

struct SnapshotFiles {
  int level = 0;
  double time = 0.0;
  double requested_time = 0.0;
  std::vector<std::string> files;
};

/// Writes the fields of one snapshot as configured in `output`; returns the
/// file names (relative to `directory`).
SnapshotFiles write_snapshot(const Simulation& sim, const Snapshot& snap,
                             const std::string& directory);

struct RunOutcome {
  Trajectory trajectory;
  nlohmann::json report;
  std::string error;  // non-empty when the run aborted
  bool ok() const { return error.empty() && trajectory.summary.all_ok(); }
};

/// Runs `config`, writing snapshots and report.json under `directory` when
/// it is non-empty. Never throws for solver failures: the report records
/// the error instead. Configuration errors still propagate.
RunOutcome execute_run(const RunConfig& config, const std::string& directory);

}  // namespace nlpf
