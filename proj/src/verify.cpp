#include "nlpf/verify.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "nlpf/error.hpp"
#include "nlpf/kernel.hpp"
#include "nlpf/oracles.hpp"
#include "nlpf/pdas.hpp"
#include "nlpf/repro.hpp"
#include "nlpf/simd.hpp"
#include "nlpf/stepper.hpp"

namespace nlpf::verify {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0e", v);
  return buf;
}

ThresholdCheck within(std::string name, double value, double tol) {
  return {std::move(name), value, "<= " + sci(tol), value <= tol};
}

double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Small 1D problem used by the PDAS cross-checks.
struct SmallProblem {
  Grid grid;
  KernelSpec kernel;
  StiffnessMatrix K;
  ConvolutionStencil stencil;
  ModelParams params;
  double tau = 1e-3;
};

SmallProblem small_problem(int n_interior, double beta) {
  const double h = 1.0 / (n_interior - 1);
  const double delta = 2.5 * h;
  SmallProblem p{build_grid(1, h, delta), KernelSpec(0.05, delta, 1), {}, {}, {}, 1e-3};
  p.K = assemble_stiffness(p.grid);
  p.stencil = build_stencil(p.grid, p.kernel);
  p.params.mu = 0.01;
  p.params.beta = beta;
  p.params.alpha = 0.9;
  p.params.rho = 20.0;
  return p;
}

// Feasible random state: a third of the nodes at each bound, the rest
// uniform in (0, 1).
std::vector<double> random_state(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> u(n);
  for (auto& v : u) {
    const double r = U(rng);
    v = r < 1.0 / 3 ? 0.0 : (r < 2.0 / 3 ? 1.0 : U(rng));
  }
  return u;
}

std::vector<double> random_theta(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.8, 1.2);
  std::vector<double> t(n);
  for (auto& v : t) v = U(rng);
  return t;
}

}  // namespace

std::vector<ThresholdCheck> kernel_checks(double c_gamma_scale) {
  std::vector<ThresholdCheck> out;
  const struct {
    double eps, delta;
    int dim;
  } cases[] = {{0.02, 0.1540, 1}, {0.01, 0.0826, 2}, {0.05, 0.3, 1}, {0.05, 0.3, 2}};
  for (const auto& c : cases) {
    const KernelSpec k(c.eps, c.delta, c.dim);
    const double closed = c_gamma_scale * c_gamma_closed_form(k);
    const double quad = c_gamma_quadrature(k);
    char tag[64];
    std::snprintf(tag, sizeof tag, "(eps=%g, delta=%g, %dD)", c.eps, c.delta, c.dim);
    out.push_back(within(std::string("c_gamma closed form vs quadrature ") + tag,
                         std::abs(closed - quad) / quad, 1e-8));
    out.push_back(within(std::string("second moment = 2 n eps^2 ") + tag,
                         second_moment_check(k), 1e-8));
  }
  const double c_F = 1.0 / 6.0;
  const double xi1 = c_gamma_scale * c_gamma_closed_form(KernelSpec(0.02, 0.1540, 1)) - c_F;
  const double xi3 = c_gamma_scale * c_gamma_closed_form(KernelSpec(0.01, 0.0826, 2)) - c_F;
  out.push_back({"xi (eps=0.02, delta=0.1540, 1D)", xi1, "0.002 +- 5e-05",
                 std::abs(xi1 - 0.002) <= 5e-5});
  out.push_back({"xi (eps=0.01, delta=0.0826, 2D)", xi3, "0.0093 +- 2e-04",
                 std::abs(xi3 - 0.0093) <= 2e-4});
  return out;
}

ThresholdCheck convolution_vs_dense(int dim, int cells, double delta_in_cells) {
  const double h = 1.0 / cells;
  const double delta = delta_in_cells * h;
  const KernelSpec kernel(0.05, delta, dim);
  const Grid g = build_grid(dim, h, delta);
  const auto st = build_stencil(g, kernel);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> u(g.num_nodes());
  for (auto& v : u) v = U(rng);
  const auto fast = convolve(st, u);
  const Eigen::MatrixXd G = oracle::convolution_matrix(g, kernel);
  const Eigen::VectorXd ref = G * Eigen::Map<const Eigen::VectorXd>(u.data(), u.size());
  const double err = max_diff(fast, std::span<const double>(ref.data(), ref.size()));
  char name[96];
  std::snprintf(name, sizeof name, "stencil convolution vs dense (%dD, %zu nodes)", dim,
                g.num_nodes());
  return within(name, err, 1e-12);
}

ThresholdCheck simd_equivalence() {
  const auto* avx = simd::avx2_kernels();
  if (!avx || !simd::cpu_supports(simd::Backend::Avx2)) {
    return {"AVX2 convolution vs scalar", 0.0, "skipped (no AVX2)", true};
  }
  const double h = 1.0 / 64;
  const KernelSpec kernel(0.02, 7.5 * h, 2);
  const Grid g = build_grid(2, h, kernel.delta());
  const auto st = build_stencil(g, kernel);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> u(g.num_nodes());
  for (auto& v : u) v = U(rng);
  const auto previous = simd::active_backend();
  simd::set_backend(simd::Backend::Scalar);
  const auto a = convolve(st, u);
  simd::set_backend(simd::Backend::Avx2);
  const auto b = convolve(st, u);
  simd::set_backend(previous);
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  return within("AVX2 convolution vs scalar (relative)", max_diff(a, b) / scale, 1e-13);
}

ThresholdCheck ac_vs_pdas(int instances, std::uint64_t seed) {
  auto p = small_problem(12, 0.0);
  std::mt19937_64 rng(seed);
  PdasConfig cfg;
  cfg.convolution_mode = ConvolutionMode::Explicit;
  double worst = 0.0;
  bool converged = true;
  for (int it = 0; it < instances; ++it) {
    const auto u_prev = random_state(p.grid.num_nodes(), rng);
    const auto theta = random_theta(p.grid.num_interior(), rng);
    const auto ac = step_phase_AC(p.grid, p.stencil, p.params, p.tau, u_prev, theta);
    const auto m = coupling_m(p.params, theta);
    const auto r = pdas_step_CH(p.grid, p.K, p.stencil, p.params, p.tau, u_prev, m, cfg);
    converged = converged && r.converged;
    worst = std::max(worst, max_diff(ac.u, r.u));
  }
  auto c = within("AC projection vs PDAS at beta=0 (" + std::to_string(instances) + " steps)",
                  worst, 1e-10);
  if (!converged) {
    c.pass = false;
    c.expected += ", PDAS did not converge";
  }
  return c;
}

ThresholdCheck pdas_vs_enumeration(int n_interior, ConvolutionMode mode, double beta,
                                   int instances, std::uint64_t seed) {
  auto p = small_problem(n_interior, beta);
  std::mt19937_64 rng(seed);
  PdasConfig cfg;
  cfg.convolution_mode = mode;
  double worst = 0.0;
  bool ok = true;
  for (int it = 0; it < instances; ++it) {
    const auto u_prev = random_state(p.grid.num_nodes(), rng);
    const auto m = coupling_m(p.params, random_theta(p.grid.num_interior(), rng));
    const auto r = pdas_step_CH(p.grid, p.K, p.stencil, p.params, p.tau, u_prev, m, cfg);
    const auto ref =
        oracle::enumerate_ch_step(p.grid, p.kernel, p.params, p.tau, u_prev, m, mode);
    if (!r.converged || ref.feasible_sets != 1) {
      ok = false;
      continue;
    }
    worst = std::max({worst, max_diff(r.u, ref.u), max_diff(r.lambda, ref.lambda)});
    if (beta > 0.0) worst = std::max(worst, max_diff(r.w, ref.w));
  }
  char name[120];
  std::snprintf(name, sizeof name, "PDAS vs 3^%d enumeration (%s, beta=%g, %d steps)",
                n_interior, mode == ConvolutionMode::Explicit ? "explicit" : "implicit", beta,
                instances);
  auto c = within(name, worst, 1e-9);
  if (!ok) {
    c.pass = false;
    c.expected += ", unique KKT point and PDAS convergence";
  }
  return c;
}

ThresholdCheck heat_eigen_decay(int steps) {
  const Grid g = build_grid(1, 1.0 / 63, 0.0);
  const auto K = assemble_stiffness(g);
  ModelParams p;
  p.L = 0.0;
  p.D = 1.0;
  const double tau = 1e-3;
  const double pi = std::numbers::pi;
  const double lambda_h = 2.0 * (1.0 - std::cos(pi * g.h)) / (g.h * g.h);
  const std::size_t n = g.num_interior();
  std::vector<double> theta(n), u(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) theta[i] = std::cos(pi * g.coord(g.interior_ids[i], 0));
  const auto theta0 = theta;
  double worst = 0.0;
  for (int k = 1; k <= steps; ++k) {
    theta = step_temperature(g, K, p, tau, theta, u, u);
    const double factor = std::pow(1.0 + tau * p.D * lambda_h, -k);
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(theta[i] - factor * theta0[i]));
    }
  }
  return within("heat eigen-decay, 64 nodes, cos(pi x)", worst, 1e-6);
}

ThresholdCheck admissibility_example1() {
  const auto rep = timestep_admissibility(example1_config(Variant::NonlocalAC));
  const bool pass = rep.status == AdmissibilityReport::Status::Pass &&
                    std::abs(rep.bound - 0.0072) < 5e-5;
  return {"beta=0 step-size bound, first reference set (C_I = 0)", rep.bound,
          "0.0072 +- 5e-05 and tau = 0.0003 admissible", pass};
}

std::vector<ThresholdCheck> implicit_step_checks(int steps) {
  auto config = example1_config(Variant::NonlocalCH);
  config.pdas.convolution_mode = ConvolutionMode::Implicit;
  config.energy_diagnostics = true;
  const Simulation sim(config);
  const Grid& g = sim.grid();
  const auto& st = *sim.stencil();
  const auto& p = config.model;
  const int total = static_cast<int>(std::lround(config.T / config.tau));
  const int n_steps = steps > 0 ? std::min(steps, total) : total;

  State s = sim.initial_state();
  ActiveSets sets = ActiveSets::from_bounds(g.restrict_interior(s.u));
  double worst_proj = 0.0, worst_energy = -1e300;
  bool converged = true;
  for (int k = 1; k <= n_steps; ++k) {
    StepDiagnostics diag;
    const auto m_prev = coupling_m(p, s.theta);
    State next = sim.advance(s, sets, diag);
    converged = converged && diag.pdas_converged;
    const auto conv = convolve(st, next.u);
    for (std::size_t i = 0; i < g.num_interior(); ++i) {
      const int id = g.interior_ids[i];
      const double gi = next.w[i] + conv[id] + p.c_F * m_prev[i] - 0.5 * p.c_F;
      const double pu = project_unit(gi, st.c_gamma_h[id] - p.c_F);
      worst_proj = std::max(worst_proj, std::abs(next.u[id] - pu));
    }
    if (diag.energy_new && diag.energy_prev) {
      worst_energy = std::max(worst_energy, *diag.energy_new - *diag.energy_prev);
    }
    s = std::move(next);
  }
  const std::string tag = " (implicit, 1D, " + std::to_string(n_steps) + " steps)";
  auto proj = within("u = P(g / xi) after PDAS" + tag, worst_proj, 1e-8);
  auto energy = within("J_k(u^k) - J_k(u^{k-1})" + tag, worst_energy, kEnergyTol);
  if (!converged) {
    proj.pass = energy.pass = false;
    proj.expected += ", PDAS did not converge";
  }
  return {proj, energy};
}

std::vector<ThresholdCheck> run_all(const Options& options) {
  auto out = kernel_checks(options.c_gamma_scale);
  out.push_back(convolution_vs_dense(1, 150, 7.3));
  out.push_back(convolution_vs_dense(2, 12, 3.6));
  out.push_back(simd_equivalence());
  out.push_back(ac_vs_pdas(50));
  out.push_back(pdas_vs_enumeration(8, ConvolutionMode::Explicit, 0.01, 5));
  out.push_back(pdas_vs_enumeration(8, ConvolutionMode::Implicit, 0.01, 5));
  out.push_back(heat_eigen_decay());
  out.push_back(admissibility_example1());
  for (auto& c : implicit_step_checks()) out.push_back(c);
  return out;
}

}  // namespace nlpf::verify
