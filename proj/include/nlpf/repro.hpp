#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nlpf/report.hpp"
#include "nlpf/stepper.hpp"

namespace nlpf {

/// Parameter sets of the three reference experiments.
RunConfig example1_config(Variant variant);
/// delta <= 0 selects the local obstacle comparison run.
RunConfig example2_config(double delta);
RunConfig example3_config(Variant variant);

inline constexpr double kExample2Deltas[] = {0.1540, 0.0770, 0.0385};
inline constexpr double kExample2Time = 0.0037;
inline constexpr double kExample3WidthTime = 0.0041;

struct ReproRun {
  std::string label;
  RunConfig config;
  RunOutcome outcome;
};

struct ReproResult {
  std::string example;
  std::vector<ReproRun> runs;
  std::vector<ThresholdCheck> checks;
  std::vector<std::string> files;
  bool ok() const;
};

/// Each repro writes its per-run outputs to `<directory>/<label>/` and the
/// comparison tables to `directory`; an empty directory skips all files.
ReproResult repro_ex1(const std::string& directory);
ReproResult repro_ex2(const std::string& directory);
ReproResult repro_ex3(const std::string& directory);
ReproResult run_repro(std::string_view example, const std::string& directory);

/// Bound, complementarity, enthalpy and convergence checks of one run.
std::vector<ThresholdCheck> invariant_checks(const std::string& label, const RunConfig& config,
                                             const RunOutcome& outcome);

}  // namespace nlpf
