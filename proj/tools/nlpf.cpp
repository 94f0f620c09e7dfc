// Command-line driver: run a config, verify the oracle suite, reproduce the
// reference experiments, or recompute interface metrics of a saved field.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlpf/config.hpp"
#include "nlpf/error.hpp"
#include "nlpf/field_io.hpp"
#include "nlpf/metrics.hpp"
#include "nlpf/report.hpp"
#include "nlpf/repro.hpp"
#include "nlpf/simd.hpp"
#include "nlpf/verify.hpp"

namespace {

std::string output_root(const std::string& flag, const std::string& fallback) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("NLPF_OUTPUT_DIR"); env && *env) {
    return std::string(env) + "/" + fallback;
  }
  return "out/" + fallback;
}

int cmd_run(const std::string& path, const std::vector<std::string>& overrides,
            const std::string& output, bool allow_warnings) {
  const auto config = nlpf::load_run_config(path, overrides);
  std::string dir = output;
  if (dir.empty() && !config.output.directory.empty()) dir = config.output.directory;
  dir = output_root(dir, std::filesystem::path(path).stem().string());
  const auto outcome = nlpf::execute_run(config, dir);
  const auto& t = outcome.trajectory;
  std::printf("%s: %d steps to t = %.6g (|T - K tau| = %.3g)\n",
              std::string(nlpf::to_string(config.variant)).c_str(), t.num_steps, t.final_time,
              t.time_mismatch);
  for (const auto& s : t.snapshots) {
    std::printf("  snapshot t = %-10.6g level %-6d interface width %d..%d cells\n", s.state.t,
                s.level, s.interface.min_width, s.interface.max_width);
  }
  std::printf("%s", nlpf::format_checks(nlpf::invariant_checks("run", config, outcome)).c_str());
  std::printf("report: %s/report.json\n", dir.c_str());
  if (!outcome.error.empty()) {
    std::fprintf(stderr, "nlpf: run aborted: %s\n", outcome.error.c_str());
    return 1;
  }
  if (!outcome.ok() && !allow_warnings) {
    std::fprintf(stderr, "nlpf: invariant check failed (use --allow-warnings to accept)\n");
    return 1;
  }
  return 0;
}

int cmd_verify(double c_gamma_scale) {
  nlpf::verify::Options opts;
  opts.c_gamma_scale = c_gamma_scale;
  const auto checks = nlpf::verify::run_all(opts);
  std::printf("%s", nlpf::format_checks(checks).c_str());
  for (const auto& c : checks) {
    if (!c.pass) return 1;
  }
  return 0;
}

int cmd_repro(const std::vector<std::string>& examples, const std::string& output) {
  bool ok = true;
  for (const auto& ex : examples) {
    const std::string dir = output_root(output.empty() ? "" : output + "/" + ex, "repro/" + ex);
    const auto res = nlpf::run_repro(ex, dir);
    std::printf("== %s (outputs in %s)\n%s", ex.c_str(), dir.c_str(),
                nlpf::format_checks(res.checks).c_str());
    ok = ok && res.ok();
  }
  return ok ? 0 : 1;
}

int cmd_metrics(const std::string& path, double tol) {
  const auto raw = nlpf::read_raw_field(path);
  const auto grid = nlpf::grid_from_raw(raw);
  const auto rep = nlpf::interface_width(grid, raw.values, tol);
  std::cout << nlpf::to_json(rep).dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal phase-field solidification solver"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker threads for the data-parallel kernels")
      ->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "run a configuration file");
  std::string config_path, output;
  std::vector<std::string> overrides;
  bool allow_warnings = false;
  run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--override", overrides, "section.key=value (repeatable)");
  run->add_option("--output", output, "output directory");
  run->add_flag("--allow-warnings", allow_warnings,
                "exit 0 even when an invariant check fails");

  auto* verify = app.add_subcommand("verify", "run the constant and oracle checks");
  double c_gamma_scale = 1.0;
  verify->add_option("--c-gamma-scale", c_gamma_scale)->group("");  // negative control

  auto* repro = app.add_subcommand("repro", "reproduce the reference experiments");
  std::vector<std::string> examples;
  repro->add_option("example", examples, "ex1, ex2, ex3 or all")
      ->required()
      ->check(CLI::IsMember({"ex1", "ex2", "ex3", "all"}));
  repro->add_option("--output", output, "output root");

  auto* metrics = app.add_subcommand("metrics", "interface metrics of a saved field");
  std::string field_path;
  double tol = 1e-3;
  metrics->add_option("field", field_path, "interior-layout field CSV")
      ->required()
      ->check(CLI::ExistingFile);
  metrics->add_option("--tol", tol, "phase threshold");

  CLI11_PARSE(app, argc, argv);
  nlpf::simd::set_num_threads(threads);

  try {
    if (*run) return cmd_run(config_path, overrides, output, allow_warnings);
    if (*verify) return cmd_verify(c_gamma_scale);
    if (*repro) {
      if (examples.size() == 1 && examples[0] == "all") examples = {"ex1", "ex2", "ex3"};
      return cmd_repro(examples, output);
    }
    if (*metrics) return cmd_metrics(field_path, tol);
  } catch (const nlpf::ConfigError& e) {
    std::fprintf(stderr, "nlpf: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "nlpf: %s\n", e.what());
    return 1;
  }
  return 0;
}
