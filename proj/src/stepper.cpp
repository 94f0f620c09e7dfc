#include "nlpf/stepper.hpp"

#include <algorithm>
#include <cmath>

#include "nlpf/error.hpp"
#include "nlpf/field_io.hpp"

namespace nlpf {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::NonlocalCH:
      return "nonlocal_CH";
    case Variant::NonlocalAC:
      return "nonlocal_AC";
    case Variant::LocalObstacle:
      return "local_obstacle";
    case Variant::LocalRegular:
      return "local_regular";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::NonlocalCH, Variant::NonlocalAC, Variant::LocalObstacle,
                    Variant::LocalRegular}) {
    if (name == to_string(v)) return v;
  }
  throw ConfigError("variant", "unknown variant '" + std::string(name) + "'");
}

void RunConfig::validate() const {
  try {
    model.validate();
    pdas.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("", e.what());
  }
  if (dim != 1 && dim != 2) throw ConfigError("grid.dim", "must be 1 or 2");
  if (!(h > 0.0 && h < 1.0)) throw ConfigError("grid.h", "must satisfy 0 < h < 1");
  if (!(tau > 0.0)) throw ConfigError("time.tau", "must be > 0");
  if (!(T >= tau * (1.0 - 1e-12))) throw ConfigError("time.T", "must be >= tau");
  if (!(epsilon > 0.0)) throw ConfigError("kernel.epsilon", "must be > 0");
  if (!(interface_tol > 0.0 && interface_tol < 0.5)) {
    throw ConfigError("output.interface_tol", "must lie in (0, 0.5)");
  }
  for (double t : snapshots) {
    if (t < 0.0 || t > T * (1.0 + 1e-12)) {
      throw ConfigError("time.snapshots", "snapshot time outside [0, T]");
    }
  }
  if (is_nonlocal(variant)) {
    if (!(delta > 0.0)) throw ConfigError("kernel.delta", "required (> 0) for nonlocal variants");
    const double x = xi(kernel(), model.c_F, true);
    if (variant == Variant::NonlocalCH) {
      if (!(model.beta > 0.0)) throw ConfigError("model.beta", "nonlocal_CH requires beta > 0");
      if (!(x > 0.0)) throw ConfigError("kernel.delta", "nonlocal_CH requires xi = c_gamma - c_F > 0");
    }
    if (variant == Variant::NonlocalAC && model.beta != 0.0) {
      throw ConfigError("model.beta", "nonlocal_AC requires beta = 0");
    }
  }
  if (variant == Variant::LocalRegular && model.beta != 0.0) {
    throw ConfigError("model.beta", "local_regular requires beta = 0");
  }
}

std::vector<double> step_temperature(const Grid& grid, const StiffnessMatrix& K,
                                     const ModelParams& p, double tau,
                                     std::span<const double> theta_prev,
                                     std::span<const double> u_new,
                                     std::span<const double> u_prev, double lin_tol) {
  const std::size_t n = grid.num_interior();
  if (theta_prev.size() != n || u_new.size() != n || u_prev.size() != n) {
    throw Error("step_temperature: field size mismatch");
  }
  const auto mass = grid.interior_mass();
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = mass[i] * (theta_prev[i] + p.L * (u_new[i] - u_prev[i]));
  }
  const CsrMatrix A = scaled_plus_diagonal(K, tau * p.D, mass);
  std::vector<double> theta(theta_prev.begin(), theta_prev.end());
  CgOptions opts;
  opts.rel_tol = lin_tol;
  const auto stats = cg_solve(A, b, theta, opts);
  if (!stats.converged) throw Error("temperature solve did not converge");
  // K has zero column sums, so the lumped enthalpy error equals sum(b - A theta);
  // a constant shift removes it without disturbing the residual beyond tolerance.
  double target = 0.0, current = 0.0, total_mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    target += b[i];
    current += mass[i] * theta[i];
    total_mass += mass[i];
  }
  const double shift = (target - current) / total_mass;
  for (auto& t : theta) t += shift;
  return theta;
}

AcStep step_phase_AC(const Grid& grid, const ConvolutionStencil& st, const ModelParams& p,
                     double tau, std::span<const double> u_prev,
                     std::span<const double> theta_prev) {
  if (u_prev.size() != grid.num_nodes() || theta_prev.size() != grid.num_interior()) {
    throw Error("step_phase_AC: field size mismatch");
  }
  const auto conv = convolve(st, u_prev);
  const double rate = p.mu / tau;
  AcStep out;
  out.u.assign(u_prev.begin(), u_prev.end());
  out.lambda.resize(grid.num_interior());
  for (std::size_t i = 0; i < grid.num_interior(); ++i) {
    const int id = grid.interior_ids[i];
    const double denom = rate + st.c_gamma_h[id] - p.c_F;
    if (!(denom > 0.0)) {
      throw Error("Allen-Cahn projection denominator mu/tau + c_gamma_h - c_F <= 0; reduce tau");
    }
    const double g = rate * u_prev[id] + conv[id] + p.c_F * coupling_m(p, theta_prev[i]) -
                     0.5 * p.c_F;
    const double u = std::clamp(g / denom, 0.0, 1.0);
    out.u[id] = u;
    out.lambda[i] = (u > 0.0 && u < 1.0) ? 0.0 : g - denom * u;
  }
  close_exterior_from_convolution(grid, st, conv, out.u);
  return out;
}

PdasResult step_phase_CH(const Grid& grid, const StiffnessMatrix& K,
                         const ConvolutionStencil& stencil, const ModelParams& params,
                         double tau, std::span<const double> u_prev,
                         std::span<const double> theta_prev, const PdasConfig& config,
                         const ActiveSets* warm_start) {
  const auto m_prev = coupling_m(params, theta_prev);
  return pdas_step_CH(grid, K, stencil, params, tau, u_prev, m_prev, config, warm_start);
}

std::vector<double> step_phase_local_regular(const Grid& grid, const StiffnessMatrix& K,
                                             const ModelParams& p, double tau, double eps,
                                             std::span<const double> u_prev,
                                             std::span<const double> theta_prev,
                                             double lin_tol) {
  const std::size_t n = grid.num_interior();
  if (u_prev.size() != n || theta_prev.size() != n) {
    throw Error("step_phase_local_regular: field size mismatch");
  }
  const auto mass = grid.interior_mass();
  const double rate = p.mu / tau;
  std::vector<double> diag(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = rate * mass[i];
    b[i] = mass[i] * (rate * u_prev[i] -
                      regular_potential_dF(u_prev[i], coupling_m(p, theta_prev[i])));
  }
  const CsrMatrix A = scaled_plus_diagonal(K, eps * eps, diag);
  std::vector<double> u(u_prev.begin(), u_prev.end());
  CgOptions opts;
  opts.rel_tol = lin_tol;
  const auto stats = cg_solve(A, b, u, opts);
  if (!stats.converged) throw Error("local regular phase solve did not converge");
  return u;
}

Simulation::Simulation(RunConfig config) : config_(std::move(config)) {
  config_.validate();
  const bool nonlocal = is_nonlocal(config_.variant);
  grid_ = build_grid(config_.dim, config_.h, nonlocal ? config_.delta : 0.0);
  stiffness_ = assemble_stiffness(grid_);
  if (nonlocal) stencil_ = build_stencil(grid_, config_.kernel());
}

State Simulation::initial_state() const {
  State s;
  const auto& init = config_.init;
  std::vector<double> u_int(grid_.num_interior());
  if (init.kind == InitialCondition::Kind::File) {
    u_int = read_field(init.path, grid_, FieldLayout::Interior);
  } else {
    constexpr double slack = 1e-12;
    for (std::size_t i = 0; i < u_int.size(); ++i) {
      const int id = grid_.interior_ids[i];
      const double x = grid_.coord(id, 0);
      if (init.kind == InitialCondition::Kind::Step) {
        u_int[i] = x <= init.a + slack ? 1.0 : 0.0;
      } else {
        bool in = x > init.a + slack && x < init.b - slack;
        if (grid_.dim == 2) {
          const double y = grid_.coord(id, 1);
          in = in && y > init.a + slack && y < init.b - slack;
        }
        const bool solid = init.kind == InitialCondition::Kind::Box ? in : !in;
        u_int[i] = solid ? 1.0 : 0.0;
      }
    }
  }
  s.u.assign(grid_.num_nodes(), 0.0);
  grid_.scatter_interior(u_int, s.u);
  if (stencil_) {
    const auto seed = s.u;
    exterior_flux_solve(grid_, *stencil_, s.u, ConvolutionMode::Implicit, seed);
  }
  s.theta.assign(grid_.num_interior(), init.theta0);
  if (config_.variant == Variant::NonlocalCH ||
      (config_.variant == Variant::LocalObstacle && config_.model.beta > 0.0)) {
    s.w.assign(grid_.num_interior(), 0.0);
  }
  if (is_obstacle(config_.variant)) s.lambda.assign(grid_.num_interior(), 0.0);
  return s;
}

double Simulation::enthalpy(const State& s) const {
  double e = 0.0;
  for (std::size_t i = 0; i < grid_.num_interior(); ++i) {
    const int id = grid_.interior_ids[i];
    e += grid_.lumped_mass[id] * (s.theta[i] - config_.model.L * s.u[id]);
  }
  return e;
}

std::vector<int> Simulation::snapshot_levels() const {
  const int K = static_cast<int>(std::lround(config_.T / config_.tau));
  std::vector<int> levels;
  for (double t : config_.snapshots) {
    levels.push_back(std::clamp(static_cast<int>(std::lround(t / config_.tau)), 0, K));
  }
  return levels;
}

State Simulation::advance(const State& prev, ActiveSets& sets, StepDiagnostics& diag) const {
  const auto& p = config_.model;
  const double tau = config_.tau;
  State next;
  next.k = prev.k + 1;
  next.t = next.k * tau;
  diag.k = next.k;

  const auto u_prev_int = grid_.restrict_interior(prev.u);
  const auto m_prev = coupling_m(p, prev.theta);
  const bool want_energy =
      stencil_ && config_.energy_diagnostics.value_or(config_.pdas.convolution_mode ==
                                                      ConvolutionMode::Implicit);

  switch (config_.variant) {
    case Variant::NonlocalCH: {
      auto r = pdas_step_CH(grid_, stiffness_, *stencil_, p, tau, prev.u, m_prev, config_.pdas,
                            &sets);
      diag.pdas_iterations = r.iterations;
      diag.pdas_converged = r.converged;
      diag.lin_residual = r.lin_residual;
      sets = r.sets;
      next.u = std::move(r.u);
      next.w = std::move(r.w);
      next.lambda = std::move(r.lambda);
      break;
    }
    case Variant::NonlocalAC: {
      if (config_.pdas.convolution_mode == ConvolutionMode::Implicit) {
        auto r = pdas_step_CH(grid_, stiffness_, *stencil_, p, tau, prev.u, m_prev,
                              config_.pdas, &sets);
        diag.pdas_iterations = r.iterations;
        diag.pdas_converged = r.converged;
        diag.lin_residual = r.lin_residual;
        sets = r.sets;
        next.u = std::move(r.u);
        next.lambda = std::move(r.lambda);
      } else {
        auto r = step_phase_AC(grid_, *stencil_, p, tau, prev.u, prev.theta);
        next.u = std::move(r.u);
        next.lambda = std::move(r.lambda);
      }
      break;
    }
    case Variant::LocalObstacle: {
      auto r = pdas_step_local_obstacle(grid_, stiffness_, p, tau, config_.epsilon, prev.u,
                                        m_prev, config_.pdas, &sets);
      diag.pdas_iterations = r.iterations;
      diag.pdas_converged = r.converged;
      diag.lin_residual = r.lin_residual;
      sets = r.sets;
      next.u = std::move(r.u);
      if (p.beta > 0.0) next.w = std::move(r.w);
      next.lambda = std::move(r.lambda);
      break;
    }
    case Variant::LocalRegular: {
      next.u = step_phase_local_regular(grid_, stiffness_, p, tau, config_.epsilon, prev.u,
                                        prev.theta, config_.pdas.lin_tol);
      break;
    }
  }

  const auto u_new_int = grid_.restrict_interior(next.u);
  next.theta = step_temperature(grid_, stiffness_, p, tau, prev.theta, u_new_int, u_prev_int,
                                config_.pdas.lin_tol);

  diag.u_min = *std::min_element(next.u.begin(), next.u.end());
  diag.u_max = *std::max_element(next.u.begin(), next.u.end());
  if (!next.lambda.empty()) diag.complementarity = verify_complementarity(u_new_int, next.lambda);
  if (want_energy) {
    diag.energy_prev = objective_Jk(grid_, stiffness_, *stencil_, p, tau, prev.u, prev.u, m_prev);
    diag.energy_new = objective_Jk(grid_, stiffness_, *stencil_, p, tau, next.u, prev.u, m_prev);
  }
  return next;
}

Trajectory Simulation::run(const std::function<void(const Snapshot&)>& on_snapshot) const {
  Trajectory traj;
  const int K = static_cast<int>(std::lround(config_.T / config_.tau));
  traj.num_steps = K;
  traj.final_time = K * config_.tau;
  traj.time_mismatch = std::abs(config_.T - traj.final_time);
  const auto levels = snapshot_levels();

  State state = initial_state();
  traj.enthalpy0 = enthalpy(state);
  double theta_mass = 0.0;
  for (std::size_t i = 0; i < grid_.num_interior(); ++i) {
    theta_mass += grid_.lumped_mass[grid_.interior_ids[i]] * state.theta[i];
  }
  traj.enthalpy_scale = 1.0 + std::abs(theta_mass);

  auto take_snapshots = [&](const State& s) {
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (levels[i] != s.k) continue;
      Snapshot snap;
      snap.requested_time = config_.snapshots[i];
      snap.level = s.k;
      snap.state = s;
      snap.interface = interface_width(grid_, grid_.restrict_interior(s.u), config_.interface_tol);
      if (on_snapshot) on_snapshot(snap);
      traj.snapshots.push_back(std::move(snap));
    }
  };
  take_snapshots(state);

  ActiveSets sets = ActiveSets::from_bounds(grid_.restrict_interior(state.u));
  auto& sum = traj.summary;
  for (int k = 1; k <= K; ++k) {
    StepDiagnostics diag;
    state = advance(state, sets, diag);
    diag.enthalpy_drift = std::abs(enthalpy(state) - traj.enthalpy0);

    if (is_obstacle(config_.variant)) {
      const double viol = std::max(-diag.u_min, diag.u_max - 1.0);
      sum.worst_bound_violation = std::max(sum.worst_bound_violation, viol);
      if (viol > kBoundTol) sum.bounds_ok = false;
      sum.worst_complementarity = std::max(sum.worst_complementarity, diag.complementarity);
      if (diag.complementarity > kComplementarityTol) sum.complementarity_ok = false;
    }
    sum.worst_enthalpy_drift = std::max(sum.worst_enthalpy_drift, diag.enthalpy_drift);
    if (diag.enthalpy_drift > kEnthalpyTol * traj.enthalpy_scale) sum.enthalpy_ok = false;
    if (diag.energy_new && diag.energy_prev) {
      const double inc = *diag.energy_new - *diag.energy_prev;
      sum.worst_energy_increase = std::max(sum.worst_energy_increase, inc);
      if (inc > kEnergyTol) sum.energy_ok = false;
    }
    if (!diag.pdas_converged) {
      sum.pdas_converged = false;
      ++sum.nonconverged_steps;
    }
    traj.steps.push_back(diag);
    take_snapshots(state);
  }
  return traj;
}

std::string_view to_string(AdmissibilityReport::Status s) {
  switch (s) {
    case AdmissibilityReport::Status::Pass:
      return "pass";
    case AdmissibilityReport::Status::Warn:
      return "warn";
    case AdmissibilityReport::Status::Unconditional:
      return "unconditional";
    case AdmissibilityReport::Status::NotComputable:
      return "not_computable";
  }
  return "unknown";
}

AdmissibilityReport timestep_admissibility(const RunConfig& config, double C_I,
                                           std::optional<double> C_eta,
                                           std::optional<double> C_eta_hat) {
  AdmissibilityReport rep;
  if (!is_nonlocal(config.variant)) {
    rep.message = "no nonlocal step-size condition for local variants";
    return rep;
  }
  const auto kernel = config.kernel();
  const double C_gamma = c_gamma_closed_form(kernel);
  const double x = C_gamma - config.model.c_F;
  const double ci2 = 1.0 + C_I * C_I;
  const double beta = config.model.beta;
  if (beta == 0.0) {
    const double denom = C_gamma * ci2 - x;
    if (denom <= 0.0) {
      rep.status = AdmissibilityReport::Status::Unconditional;
      rep.message = "bound vacuous: unconditional";
      return rep;
    }
    rep.bound = config.model.mu / denom;
  } else {
    if (!C_eta || !C_eta_hat) {
      rep.message = "not computable from the available constants (C_eta, C_eta_hat required)";
      return rep;
    }
    rep.bound = 2.0 * x * config.model.mu / ((*C_eta * *C_eta + beta * *C_eta_hat * *C_eta_hat) * ci2);
  }
  rep.status = config.tau < rep.bound ? AdmissibilityReport::Status::Pass
                                      : AdmissibilityReport::Status::Warn;
  rep.message = "tau = " + std::to_string(config.tau) + ", bound = " + std::to_string(rep.bound);
  return rep;
}

}  // namespace nlpf
