// One PASS/FAIL line per acceptance criterion; details follow indented.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "nlpf/repro.hpp"
#include "nlpf/verify.hpp"

using namespace nlpf;

namespace {

struct Criterion {
  std::string id;
  std::string title;
  bool pass = true;
  double seconds = 0.0;
  std::vector<ThresholdCheck> details;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Criterion make(std::string id, std::string title, const std::function<std::vector<ThresholdCheck>()>& body) {
  Criterion c{std::move(id), std::move(title)};
  const auto t0 = Clock::now();
  c.details = body();
  c.seconds = since(t0);
  for (const auto& d : c.details) c.pass = c.pass && d.pass;
  return c;
}

std::vector<ThresholdCheck> with_prefix(const ReproResult& r, const std::string& prefix) {
  std::vector<ThresholdCheck> out;
  for (const auto& c : r.checks) {
    if (c.name.rfind(prefix, 0) == 0) out.push_back(c);
  }
  return out;
}

ThresholdCheck runtime_check(const std::string& what, double seconds, double limit) {
  return {what + " runtime [s]", seconds, "< " + std::to_string(limit), seconds < limit};
}

void print(const Criterion& c) {
  std::printf("%s  [%s] %s (%.1f s)\n", c.pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(),
              c.seconds);
  for (const auto& d : c.details) {
    std::printf("        %-4s %-60s %-14.6g %s\n", d.pass ? "ok" : "BAD", d.name.c_str(), d.value,
                d.expected.c_str());
  }
  std::fflush(stdout);
}

}  // namespace

int main() {
  std::vector<Criterion> all;
  auto add = [&](Criterion c) {
    print(c);
    all.push_back(std::move(c));
  };

  add(make("1", "kernel constants", [] {
    const auto t0 = Clock::now();
    auto checks = verify::kernel_checks();
    checks.push_back(runtime_check("kernel checks", since(t0), 1.0));
    return checks;
  }));

  std::vector<ReproResult> repros;
  add(make("2", "first reference set: sharp nonlocal CH, diffuse local", [&] {
    const auto t0 = Clock::now();
    repros.push_back(repro_ex1(""));
    auto checks = with_prefix(repros.back(), "ex1 ");
    checks.push_back(runtime_check("ex1", since(t0), 60.0));
    return checks;
  }));
  add(make("3", "2D widths at t = 0.0041 for the four variants", [&] {
    repros.push_back(repro_ex3(""));
    return with_prefix(repros.back(), "ex3 ");
  }));
  ReproResult ex2;
  {
    const auto t0 = Clock::now();
    ex2 = repro_ex2("");
    std::printf("        (ex2 runs: %.1f s)\n", since(t0));
    repros.push_back(ex2);
  }

  auto across_runs = [&](const std::function<ThresholdCheck(const ReproRun&)>& f) {
    std::vector<ThresholdCheck> out;
    for (const auto& r : repros) {
      for (const auto& run : r.runs) out.push_back(f(run));
    }
    return out;
  };
  auto label = [](const ReproRun& run) {
    return std::string(to_string(run.config.variant)) == run.label
               ? run.label
               : run.label + " (" + std::string(to_string(run.config.variant)) + ")";
  };
  add(make("4", "bound feasibility over every step of every repro run", [&] {
    return across_runs([&](const ReproRun& run) {
      const auto& s = run.outcome.trajectory.summary;
      if (!is_obstacle(run.config.variant)) {
        return ThresholdCheck{label(run) + " (regular potential, exempt)", 0.0, "n/a", true};
      }
      return ThresholdCheck{label(run) + " worst bound violation", s.worst_bound_violation,
                            "<= 1e-12",
                            run.outcome.error.empty() && s.worst_bound_violation <= kBoundTol};
    });
  }));
  add(make("5", "complementarity after every PDAS solve", [&] {
    return across_runs([&](const ReproRun& run) {
      const auto& s = run.outcome.trajectory.summary;
      return ThresholdCheck{label(run) + " worst complementarity", s.worst_complementarity,
                            "<= 1e-10",
                            run.outcome.error.empty() &&
                                s.worst_complementarity <= kComplementarityTol};
    });
  }));
  add(make("6", "enthalpy conservation over every step", [&] {
    return across_runs([&](const ReproRun& run) {
      const auto& t = run.outcome.trajectory;
      const double rel = t.summary.worst_enthalpy_drift / t.enthalpy_scale;
      return ThresholdCheck{label(run) + " worst drift / scale", rel, "<= 1e-10",
                            run.outcome.error.empty() && rel <= kEnthalpyTol};
    });
  }));

  add(make("7", "oracle equivalences", [] {
    std::vector<ThresholdCheck> c;
    c.push_back(verify::ac_vs_pdas(50));
    for (auto mode : {ConvolutionMode::Explicit, ConvolutionMode::Implicit}) {
      for (double beta : {0.0, 0.02}) c.push_back(verify::pdas_vs_enumeration(10, mode, beta, 2));
    }
    c.push_back(verify::convolution_vs_dense(1, 150, 7.3));
    c.push_back(verify::convolution_vs_dense(2, 6, 2.2));
    return c;
  }));

  std::vector<ThresholdCheck> implicit;
  add(make("8", "projection formula after implicit PDAS (1D)", [&] {
    implicit = verify::implicit_step_checks();
    return std::vector<ThresholdCheck>{implicit.at(0)};
  }));
  add(make("9", "energy descent per step, implicit 1D runs", [&] {
    std::vector<ThresholdCheck> c{implicit.at(1)};
    for (const auto& run : ex2.runs) {
      if (run.config.pdas.convolution_mode != ConvolutionMode::Implicit ||
          !is_nonlocal(run.config.variant)) {
        continue;
      }
      const auto& s = run.outcome.trajectory.summary;
      c.push_back({run.label + " worst J_k increase", s.worst_energy_increase, "<= 1e-12",
                   run.outcome.error.empty() && s.energy_ok &&
                       s.worst_energy_increase <= kEnergyTol});
    }
    return c;
  }));
  add(make("10", "heat equation control", [] {
    return std::vector<ThresholdCheck>{verify::heat_eigen_decay(10)};
  }));
  add(make("11", "distance to the local solution decreases with delta", [&] {
    return with_prefix(ex2, "ex2 distance");
  }));

  int failed = 0;
  for (const auto& c : all) failed += c.pass ? 0 : 1;
  std::printf("\n%zu criteria, %d failed\n", all.size(), failed);
  return failed == 0 ? 0 : 1;
}
