#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlpf/grid.hpp"
#include "nlpf/kernel.hpp"
#include "nlpf/metrics.hpp"
#include "nlpf/nonlocal_ops.hpp"
#include "nlpf/pdas.hpp"
#include "nlpf/physics.hpp"

namespace nlpf {

enum class Variant { NonlocalCH, NonlocalAC, LocalObstacle, LocalRegular };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);
inline bool is_nonlocal(Variant v) {
  return v == Variant::NonlocalCH || v == Variant::NonlocalAC;
}
inline bool is_obstacle(Variant v) { return v != Variant::LocalRegular; }

struct InitialCondition {
  // Step: solid for x <= a. Box: solid inside (a, b)^dim, liquid outside.
  // Pool: the complement, liquid inside the box and solid around it.
  enum class Kind { Step, Box, Pool, File };
  Kind kind = Kind::Step;
  double a = 0.5;  // step position, or box lower corner
  double b = 1.0;  // box upper corner
  std::string path;
  double theta0 = 0.0;
};

struct OutputSettings {
  std::string directory;
  bool csv = true;
  bool vtk = false;
  bool include_exterior = false;
};

struct RunConfig {
  ModelParams model;
  double epsilon = 0.0;
  double delta = 0.0;
  int dim = 1;
  double h = 0.01;
  double tau = 1e-3;
  double T = 1e-3;
  std::vector<double> snapshots;
  Variant variant = Variant::NonlocalCH;
  PdasConfig pdas;
  InitialCondition init;
  OutputSettings output;
  double interface_tol = 1e-3;
  // Evaluate J_k before/after each nonlocal step. Defaults to on in
  // implicit convolution mode, where descent is guaranteed.
  std::optional<bool> energy_diagnostics;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
  KernelSpec kernel() const { return KernelSpec(epsilon, delta, dim); }
};

/// Nodal fields at one time level. theta, w, lambda are in interior order;
/// u covers every node (interior + interaction layer).
struct State {
  int k = 0;
  double t = 0.0;
  std::vector<double> theta;
  std::vector<double> u;
  std::vector<double> w;       // empty when the variant has no w
  std::vector<double> lambda;  // empty for the regular potential
};

struct StepDiagnostics {
  int k = 0;
  int pdas_iterations = 0;
  bool pdas_converged = true;
  double lin_residual = 0.0;
  double complementarity = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  double enthalpy_drift = 0.0;
  std::optional<double> energy_prev;  // J_k(u^{k-1})
  std::optional<double> energy_new;   // J_k(u^k)
};

struct Snapshot {
  double requested_time = 0.0;
  int level = 0;
  State state;
  InterfaceReport interface;
};

struct InvariantSummary {
  bool bounds_ok = true;
  bool complementarity_ok = true;
  bool enthalpy_ok = true;
  bool energy_ok = true;
  bool pdas_converged = true;
  double worst_bound_violation = 0.0;
  double worst_complementarity = 0.0;
  double worst_enthalpy_drift = 0.0;
  double worst_energy_increase = -1e300;
  int nonconverged_steps = 0;

  bool all_ok() const {
    return bounds_ok && complementarity_ok && enthalpy_ok && energy_ok && pdas_converged;
  }
};

inline constexpr double kBoundTol = 1e-12;
inline constexpr double kComplementarityTol = 1e-10;
inline constexpr double kEnthalpyTol = 1e-10;
inline constexpr double kEnergyTol = 1e-12;

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<StepDiagnostics> steps;
  int num_steps = 0;
  double final_time = 0.0;
  double time_mismatch = 0.0;  // |T - K tau|
  double enthalpy0 = 0.0;
  double enthalpy_scale = 1.0;
  InvariantSummary summary;
};

/// theta_new from (M + tau D K) theta = M theta_prev + L M (u_new - u_prev),
/// all fields in interior order.
std::vector<double> step_temperature(const Grid& grid, const StiffnessMatrix& K,
                                     const ModelParams& params, double tau,
                                     std::span<const double> theta_prev,
                                     std::span<const double> u_new,
                                     std::span<const double> u_prev,
                                     double lin_tol = 1e-12);

struct AcStep {
  std::vector<double> u;       // all nodes
  std::vector<double> lambda;  // interior order
};

/// Allen-Cahn (beta = 0) phase step by direct nodal projection with lagged
/// convolution; no solve. Throws when mu/tau + c_gamma_h - c_F <= 0.
AcStep step_phase_AC(const Grid& grid, const ConvolutionStencil& stencil,
                     const ModelParams& params, double tau,
                     std::span<const double> u_prev, std::span<const double> theta_prev);

/// Nonlocal Cahn-Hilliard phase step; delegates to pdas_step_CH.
PdasResult step_phase_CH(const Grid& grid, const StiffnessMatrix& K,
                         const ConvolutionStencil& stencil, const ModelParams& params,
                         double tau, std::span<const double> u_prev,
                         std::span<const double> theta_prev, const PdasConfig& config,
                         const ActiveSets* warm_start = nullptr);

/// Local model with the regular quartic potential, stiffness implicit and
/// potential explicit. Fields in interior order.
std::vector<double> step_phase_local_regular(const Grid& grid, const StiffnessMatrix& K,
                                             const ModelParams& params, double tau,
                                             double eps_interface,
                                             std::span<const double> u_prev,
                                             std::span<const double> theta_prev,
                                             double lin_tol = 1e-12);

/// Grid, stiffness and (for nonlocal variants) stencil of one run.
class Simulation {
 public:
  explicit Simulation(RunConfig config);

  const RunConfig& config() const { return config_; }
  const Grid& grid() const { return grid_; }
  const StiffnessMatrix& stiffness() const { return stiffness_; }
  const ConvolutionStencil* stencil() const { return stencil_ ? &*stencil_ : nullptr; }

  State initial_state() const;

  /// Loops k = 1 .. round(T / tau). `on_snapshot` (optional) is called for
  /// every snapshot as it is taken.
  Trajectory run(const std::function<void(const Snapshot&)>& on_snapshot = {}) const;

  /// Advances one level; updates `sets` (warm start) and fills `diag`.
  State advance(const State& prev, ActiveSets& sets, StepDiagnostics& diag) const;

  double enthalpy(const State& s) const;
  /// Snapshot levels for the configured times (rounded to the nearest level).
  std::vector<int> snapshot_levels() const;

 private:
  RunConfig config_;
  Grid grid_;
  StiffnessMatrix stiffness_;
  std::optional<ConvolutionStencil> stencil_;
};

inline Trajectory run(const RunConfig& config) { return Simulation(config).run(); }

struct AdmissibilityReport {
  enum class Status { Pass, Warn, Unconditional, NotComputable };
  Status status = Status::NotComputable;
  double bound = 0.0;  // admissible tau < bound (when computed)
  std::string message;
};

std::string_view to_string(AdmissibilityReport::Status s);

/// Advisory well-posedness check of tau. beta = 0: tau < mu / (C_gamma (1 +
/// C_I^2) - xi). beta > 0 needs the kernel mollifier constants, which only
/// the caller can supply.
AdmissibilityReport timestep_admissibility(const RunConfig& config, double C_I = 0.0,
                                           std::optional<double> C_eta = std::nullopt,
                                           std::optional<double> C_eta_hat = std::nullopt);

}  // namespace nlpf
