#include "nlpf/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "nlpf/config.hpp"
#include "nlpf/error.hpp"
#include "nlpf/field_io.hpp"

namespace nlpf {

using nlohmann::json;

std::string format_checks(const std::vector<ThresholdCheck>& checks) {
  std::size_t w = 0;
  for (const auto& c : checks) w = std::max(w, c.name.size());
  std::string out;
  for (const auto& c : checks) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-14.6g", c.value);
    out += (c.pass ? "PASS  " : "FAIL  ") + c.name + std::string(w - c.name.size() + 2, ' ') +
           buf + "  " + c.expected + "\n";
  }
  return out;
}

json to_json(const ThresholdCheck& c) {
  json j = {{"name", c.name}, {"expected", c.expected}, {"pass", c.pass}};
  if (std::isfinite(c.value)) j["value"] = c.value;
  return j;
}

json to_json(const InterfaceReport& r) {
  return {{"tol", r.tol},
          {"min_width", r.min_width},
          {"max_width", r.max_width},
          {"median_width", r.median_width},
          {"lines_with_transition", r.lines_with_transition},
          {"normal_min_width", r.normal_min_width},
          {"normal_max_width", r.normal_max_width},
          {"normal_lines", r.normal_widths.size()},
          {"solid_fraction", r.solid_fraction},
          {"liquid_fraction", r.liquid_fraction}};
}

json to_json(const StepDiagnostics& d) {
  json j = {{"k", d.k},
            {"pdas_iterations", d.pdas_iterations},
            {"pdas_converged", d.pdas_converged},
            {"lin_residual", d.lin_residual},
            {"complementarity", d.complementarity},
            {"u_min", d.u_min},
            {"u_max", d.u_max},
            {"enthalpy_drift", d.enthalpy_drift}};
  if (d.energy_prev) j["energy_prev"] = *d.energy_prev;
  if (d.energy_new) j["energy_new"] = *d.energy_new;
  return j;
}

json to_json(const InvariantSummary& s) {
  json j = {{"bounds_ok", s.bounds_ok},
            {"complementarity_ok", s.complementarity_ok},
            {"enthalpy_ok", s.enthalpy_ok},
            {"energy_ok", s.energy_ok},
            {"pdas_converged", s.pdas_converged},
            {"nonconverged_steps", s.nonconverged_steps},
            {"worst_bound_violation", s.worst_bound_violation},
            {"worst_complementarity", s.worst_complementarity},
            {"worst_enthalpy_drift", s.worst_enthalpy_drift},
            {"all_ok", s.all_ok()}};
  if (s.worst_energy_increase > -1e300) j["worst_energy_increase"] = s.worst_energy_increase;
  return j;
}

json resolved_config_json(const Simulation& sim) {
  const auto& c = sim.config();
  const auto& g = sim.grid();
  json j;
  j["variant"] = std::string(to_string(c.variant));
  j["model"] = {{"mu", c.model.mu},       {"L", c.model.L},         {"D", c.model.D},
                {"beta", c.model.beta},   {"c_F", c.model.c_F},     {"alpha", c.model.alpha},
                {"rho", c.model.rho},     {"theta_e", c.model.theta_e}};
  j["grid"] = {{"dim", g.dim},       {"requested_h", g.requested_h}, {"h", g.h},
               {"cells", g.cells},   {"layer", g.layer},             {"nodes_per_axis", g.nx},
               {"nodes", g.num_nodes()}, {"interior_nodes", g.num_interior()}};
  j["time"] = {{"tau", c.tau}, {"T", c.T}, {"snapshots", c.snapshots}};
  j["solver"] = {{"convolution_mode", std::string(to_string(c.pdas.convolution_mode))},
                 {"pdas_c", c.pdas.c_penalty},
                 {"pdas_max_iters", c.pdas.max_iters},
                 {"lin_tol", c.pdas.lin_tol}};
  j["kernel"] = {{"epsilon", c.epsilon}};
  if (is_nonlocal(c.variant)) {
    const auto k = c.kernel();
    const double cg = c_gamma_closed_form(k);
    j["kernel"]["delta"] = c.delta;
    j["kernel"]["family"] = std::string(to_string(k.family()));
    j["kernel"]["c_gamma"] = cg;
    j["kernel"]["xi"] = cg - c.model.c_F;
    const auto adm = timestep_admissibility(c);
    j["timestep_admissibility"] = {{"status", std::string(to_string(adm.status))},
                                   {"bound", adm.bound},
                                   {"message", adm.message}};
  }
  j["interface_convention"] =
      "per grid line: cells with both end values in (tol, 1-tol) plus cells jumping directly "
      "between the pure phases, counted per run between pure nodes; 2D statistics over row "
      "and column runs that connect the two phases, normal_* restricted to lines within "
      "22.5 degrees of the interface normal";
  j["interface_tol"] = c.interface_tol;
  return j;
}

SnapshotFiles write_snapshot(const Simulation& sim, const Snapshot& snap,
                             const std::string& directory) {
  const auto& g = sim.grid();
  const auto& out = sim.config().output;
  SnapshotFiles f;
  f.level = snap.level;
  f.time = snap.state.t;
  f.requested_time = snap.requested_time;
  const std::string tag = "_k" + std::to_string(snap.level);
  const auto u_int = g.restrict_interior(snap.state.u);
  std::vector<std::pair<std::string, std::vector<double>>> fields = {
      {"u", u_int}, {"theta", snap.state.theta}};
  if (!snap.state.w.empty()) fields.emplace_back("w", snap.state.w);
  if (!snap.state.lambda.empty()) fields.emplace_back("lambda", snap.state.lambda);
  if (out.csv) {
    for (const auto& [name, values] : fields) {
      const std::string file = name + tag + ".csv";
      if (name == "u" && out.include_exterior) {
        write_field(directory + "/" + file, g, snap.state.u, FieldLayout::AllNodes);
      } else {
        write_field(directory + "/" + file, g, values, FieldLayout::Interior);
      }
      f.files.push_back(file);
    }
  }
  if (out.vtk) {
    const std::string file = "fields" + tag + ".vtk";
    write_vtk(directory + "/" + file, g, fields, FieldLayout::Interior);
    f.files.push_back(file);
  }
  return f;
}

RunOutcome execute_run(const RunConfig& config, const std::string& directory) {
  Simulation sim(config);
  RunOutcome outcome;
  json& rep = outcome.report;
  rep["config"] = resolved_config_json(sim);
  if (!directory.empty()) std::filesystem::create_directories(directory);

  std::vector<SnapshotFiles> manifest;
  try {
    outcome.trajectory = sim.run([&](const Snapshot& s) {
      if (!directory.empty()) manifest.push_back(write_snapshot(sim, s, directory));
    });
  } catch (const Error& e) {
    outcome.error = e.what();
  }

  const auto& traj = outcome.trajectory;
  rep["num_steps"] = traj.num_steps;
  rep["final_time"] = traj.final_time;
  rep["time_mismatch"] = traj.time_mismatch;
  rep["enthalpy0"] = traj.enthalpy0;
  rep["enthalpy_scale"] = traj.enthalpy_scale;
  json steps = json::array();
  for (const auto& d : traj.steps) steps.push_back(to_json(d));
  rep["steps"] = std::move(steps);
  json snaps = json::array();
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const auto& s = traj.snapshots[i];
    json js = {{"requested_time", s.requested_time},
               {"level", s.level},
               {"time", s.state.t},
               {"interface", to_json(s.interface)}};
    if (i < manifest.size()) js["files"] = manifest[i].files;
    snaps.push_back(std::move(js));
  }
  rep["snapshots"] = std::move(snaps);
  rep["summary"] = to_json(traj.summary);
  if (!outcome.error.empty()) rep["error"] = outcome.error;
  rep["ok"] = outcome.ok();

  if (!directory.empty()) {
    std::ofstream os(directory + "/report.json");
    if (!os) throw Error("cannot write report to '" + directory + "'");
    os << rep.dump(2) << '\n';
    std::ofstream cfg(directory + "/resolved.cfg");
    write_config(cfg, config);
  }
  return outcome;
}

}  // namespace nlpf
