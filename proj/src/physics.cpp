#include "nlpf/physics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlpf/error.hpp"

namespace nlpf {

void ModelParams::validate() const {
  if (!(mu > 0.0)) throw Error("model: mu must be > 0");
  if (!(D > 0.0)) throw Error("model: D must be > 0");
  if (!(beta >= 0.0)) throw Error("model: beta must be >= 0");
  if (!(c_F > 0.0)) throw Error("model: c_F must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("model: alpha must lie in (0, 1)");
  if (!(rho > 0.0)) throw Error("model: rho must be > 0");
  if (!std::isfinite(L) || !std::isfinite(theta_e)) throw Error("model: L and theta_e must be finite");
}

double coupling_m(const ModelParams& p, double theta) {
  return (p.alpha / std::numbers::pi) * std::atan(p.rho * (p.theta_e - theta));
}

std::vector<double> coupling_m(const ModelParams& p, std::span<const double> theta) {
  std::vector<double> m(theta.size());
  std::transform(theta.begin(), theta.end(), m.begin(),
                 [&](double t) { return coupling_m(p, t); });
  return m;
}

double project_unit(double g, double scale) {
  if (!(scale > 0.0)) throw Error("project_unit: scale must be > 0");
  return std::clamp(g / scale, 0.0, 1.0);
}

std::vector<double> project_unit(std::span<const double> g, double scale) {
  if (!(scale > 0.0)) throw Error("project_unit: scale must be > 0");
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = std::clamp(g[i] / scale, 0.0, 1.0);
  return out;
}

double regular_potential(double u, double m) {
  const double a = u * (1.0 - u);
  return 0.25 * a * a + m * (u * u * u / 3.0 - 0.5 * u * u);
}

double regular_potential_dF(double u, double m) {
  return 0.5 * u * (1.0 - u) * (1.0 - 2.0 * u) + m * (u * u - u);
}

double greens_dual_norm(const Grid& grid, const StiffnessMatrix& K, double beta,
                        std::span<const double> v) {
  if (v.size() != grid.num_interior()) throw Error("greens_dual_norm: size mismatch");
  if (!(beta >= 0.0)) throw Error("greens_dual_norm: beta must be >= 0");
  const auto mass = grid.interior_mass();
  if (beta == 0.0) return lumped_inner_interior(grid, v, v);
  std::vector<double> rhs(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) rhs[i] = mass[i] * v[i];
  const CsrMatrix A = scaled_plus_diagonal(K, beta, mass);
  std::vector<double> z(v.begin(), v.end());
  const auto stats = cg_solve(A, rhs, z);
  if (!stats.converged) throw Error("greens_dual_norm: linear solve failed");
  return lumped_inner_interior(grid, v, z);
}

double objective_Jk(const Grid& grid, const StiffnessMatrix& K,
                    const ConvolutionStencil& stencil, const ModelParams& params,
                    double tau, std::span<const double> u,
                    std::span<const double> u_prev, std::span<const double> m_prev) {
  if (u.size() != grid.num_nodes() || u_prev.size() != grid.num_nodes() ||
      m_prev.size() != grid.num_interior()) {
    throw Error("objective_Jk: field size mismatch");
  }
  const auto conv = convolve(stencil, u);
  double quad = 0.0;
  double linear = 0.0;
  std::vector<double> diff(grid.num_interior());
  for (std::size_t i = 0; i < grid.num_interior(); ++i) {
    const int id = grid.interior_ids[i];
    const double m = grid.lumped_mass[id];
    const double xi_j = stencil.c_gamma_h[id] - params.c_F;
    quad += m * (xi_j * u[id] * u[id] - u[id] * conv[id]);
    linear += m * (params.c_F - 2.0 * params.c_F * m_prev[i]) * u[id];
    diff[i] = u[id] - u_prev[id];
  }
  const double dual = greens_dual_norm(grid, K, params.beta, diff);
  return 0.5 * quad + params.mu / (2.0 * tau) * dual + 0.5 * linear;
}

}  // namespace nlpf
