#pragma once

#include <span>
#include <vector>

#include "nlpf/grid.hpp"
#include "nlpf/nonlocal_ops.hpp"

namespace nlpf {

struct ModelParams {
  double mu = 1.0;       // relaxation time
  double L = 0.0;        // latent heat
  double D = 1.0;        // thermal diffusivity
  double beta = 0.0;     // de-regularisation of the time derivative
  double c_F = 1.0 / 6.0;
  double alpha = 0.9;    // coupling amplitude, 0 < alpha < 1
  double rho = 1.0;      // coupling steepness
  double theta_e = 1.0;  // equilibrium temperature

  /// Throws on out-of-range values (alpha >= 1 is rejected so |m| < 1/2).
  void validate() const;
};

/// m(theta) = (alpha/pi) atan(rho (theta_e - theta)).
double coupling_m(const ModelParams& params, double theta);
std::vector<double> coupling_m(const ModelParams& params, std::span<const double> theta);

/// clamp(g / scale, 0, 1) elementwise; throws for scale <= 0.
std::vector<double> project_unit(std::span<const double> g, double scale);
double project_unit(double g, double scale);

/// d/du of 1/4 u^2 (1-u)^2 + m (u^3/3 - u^2/2).
double regular_potential_dF(double u, double m);
double regular_potential(double u, double m);

/// ||v||^2 in the dual of V_A, V_A = H^1 with (I - beta Laplace): the
/// lumped L^2 norm for beta = 0, otherwise <v, z>_h with (M + beta K) z = M v.
/// `v` is in interior order.
double greens_dual_norm(const Grid& grid, const StiffnessMatrix& K, double beta,
                        std::span<const double> v);

/// Discrete objective of one phase step,
///   J(u) = 1/2 sum_j m_j (xi_j u_j^2 - u_j (gamma (*) u)_j)
///        + mu/(2 tau) ||u - u_prev||^2_{V_A'} + 1/2 (c_F - 2 c_F m_prev, u)_h,
/// with xi_j = c_gamma_h_j - c_F. `u` and `u_prev` are all-node fields
/// (exterior values enter through the convolution); `m_prev` is in
/// interior order.
double objective_Jk(const Grid& grid, const StiffnessMatrix& K,
                    const ConvolutionStencil& stencil, const ModelParams& params,
                    double tau, std::span<const double> u,
                    std::span<const double> u_prev, std::span<const double> m_prev);

}  // namespace nlpf
