#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nlpf/grid.hpp"
#include "nlpf/nonlocal_ops.hpp"
#include "nlpf/physics.hpp"

namespace nlpf {

/// Per interior node: -1 pinned at 0, +1 pinned at 1, 0 inactive.
struct ActiveSets {
  std::vector<std::int8_t> state;

  static ActiveSets all_inactive(std::size_t n);
  /// Nodes with u == 1 (u == 0) start in the upper (lower) set.
  static ActiveSets from_bounds(std::span<const double> u_interior);

  std::size_t size() const noexcept { return state.size(); }
  std::size_t count_upper() const;
  std::size_t count_lower() const;
  std::size_t count_inactive() const { return size() - count_upper() - count_lower(); }
  bool operator==(const ActiveSets&) const = default;
};

/// upper = {lambda + c (u - 1) > 0}, lower = {lambda + c u < 0}.
ActiveSets update_active_sets(std::span<const double> u_interior,
                              std::span<const double> lambda, double c);

struct PdasConfig {
  double c_penalty = 0.0;  // 0: largest system diagonal in multiplier units
  int max_iters = 500;
  double lin_tol = 1e-12;
  ConvolutionMode convolution_mode = ConvolutionMode::Explicit;

  void validate() const;
};

struct PdasResult {
  std::vector<double> u;       // all nodes
  std::vector<double> w;       // interior order
  std::vector<double> lambda;  // interior order
  ActiveSets sets;
  int iterations = 0;
  bool converged = false;
  double lin_residual = 0.0;   // worst relative residual of the inner solves
};

/// One nonlocal phase step (obstacle potential) by primal-dual active sets:
///   mu M (u - u_prev) + tau (M + beta K) w = 0,
///   xi_j u_j - (gamma (*) u)_j - w_j + lambda_j = c_F m_prev_j - c_F/2,
///   N_h u = 0 on the interaction layer, plus complementarity.
/// Explicit mode lags the convolution (gamma (*) u_prev) and reduces each
/// iteration to one SPD solve in w; implicit mode solves the coupled system
/// directly. `u_prev` covers all nodes; `m_prev` is in interior order.
/// beta = 0 is accepted (the Allen-Cahn limit, used as a cross-check).
PdasResult pdas_step_CH(const Grid& grid, const StiffnessMatrix& K,
                        const ConvolutionStencil& stencil, const ModelParams& params,
                        double tau, std::span<const double> u_prev,
                        std::span<const double> m_prev, const PdasConfig& config,
                        const ActiveSets* warm_start = nullptr);

/// Backward-Euler step of the local obstacle model
///   mu (u - u_prev)/tau - eps^2 Laplace u - c_F u + c_F/2 - c_F m + lambda = 0
/// (beta = 0), or, for beta > 0, the same chemical potential driving
/// mu M (u - u_prev) + tau (M + beta K) w = 0. Grid must have no layer.
PdasResult pdas_step_local_obstacle(const Grid& grid, const StiffnessMatrix& K,
                                    const ModelParams& params, double tau,
                                    double eps_interface, std::span<const double> u_prev,
                                    std::span<const double> m_prev,
                                    const PdasConfig& config,
                                    const ActiveSets* warm_start = nullptr);

/// max_j of min(lambda_+, 1 - u), min(lambda_-, u) and bound violations.
double verify_complementarity(std::span<const double> u_interior,
                              std::span<const double> lambda);

}  // namespace nlpf
