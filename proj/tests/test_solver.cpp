#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "nlpf/error.hpp"
#include "nlpf/linear_solver.hpp"
#include "nlpf/oracles.hpp"
#include "nlpf/pdas.hpp"
#include "nlpf/stepper.hpp"
#include "nlpf/verify.hpp"

using namespace nlpf;

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct Small {
  Grid grid;
  KernelSpec kernel;
  StiffnessMatrix K;
  ConvolutionStencil st;
  ModelParams p;
  double tau = 1e-3;

  Small(int n_interior, double beta)
      : grid(build_grid(1, 1.0 / (n_interior - 1), 2.5 / (n_interior - 1))),
        kernel(0.05, 2.5 / (n_interior - 1), 1) {
    K = assemble_stiffness(grid);
    st = build_stencil(grid, kernel);
    p.mu = 0.01;
    p.beta = beta;
    p.alpha = 0.9;
    p.rho = 20.0;
  }
};

std::vector<double> random_u(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> u(n);
  for (auto& v : u) {
    const double r = U(rng);
    v = r < 1.0 / 3 ? 0.0 : (r < 2.0 / 3 ? 1.0 : U(rng));
  }
  return u;
}

// Exhaustive solve of the lumped local obstacle step
//   (mu/tau - c_F) M u + eps^2 K u + M lambda = mu/tau M u_prev + M (c_F m - c_F/2).
std::vector<double> enumerate_local(const Grid& g, const ModelParams& p, double tau, double eps,
                                    const std::vector<double>& u_prev,
                                    const std::vector<double>& m, int& feasible) {
  const int n = static_cast<int>(g.num_interior());
  const auto mass = g.interior_mass();
  const Eigen::MatrixXd K = oracle::stiffness_1d(g);
  Eigen::MatrixXd A = eps * eps * K;
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    A(i, i) += (p.mu / tau - p.c_F) * mass[i];
    b[i] = mass[i] * (p.mu / tau * u_prev[i] + p.c_F * m[i] - 0.5 * p.c_F);
  }
  std::vector<double> best;
  feasible = 0;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    std::vector<int> s(n);
    for (int i = 0, c = code; i < n; ++i, c /= 3) s[i] = c % 3;  // 0 free, 1 upper, 2 lower
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    std::vector<int> free;
    for (int i = 0; i < n; ++i) {
      if (s[i] == 1) u[i] = 1.0;
      if (s[i] == 0) free.push_back(i);
    }
    const int nf = static_cast<int>(free.size());
    if (nf > 0) {
      Eigen::MatrixXd Aff(nf, nf);
      Eigen::VectorXd rhs(nf);
      const Eigen::VectorXd Au = A * u;
      for (int a = 0; a < nf; ++a) {
        rhs[a] = b[free[a]] - Au[free[a]];
        for (int c = 0; c < nf; ++c) Aff(a, c) = A(free[a], free[c]);
      }
      const Eigen::VectorXd uf = Aff.fullPivLu().solve(rhs);
      for (int a = 0; a < nf; ++a) u[free[a]] = uf[a];
    }
    const Eigen::VectorXd r = b - A * u;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      const double lambda = r[i] / mass[i];
      if (s[i] == 0) ok = u[i] >= -1e-11 && u[i] <= 1.0 + 1e-11;
      if (s[i] == 1) ok = lambda >= -1e-11;
      if (s[i] == 2) ok = lambda <= 1e-11;
    }
    if (ok) {
      ++feasible;
      best.assign(u.data(), u.data() + n);
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("linear_solver") {
  TEST_CASE("CG matches a dense solve on a random SPD system") {
    const Grid g = build_grid(2, 1.0 / 30, 0.0);
    const auto K = assemble_stiffness(g);
    std::vector<double> d(g.num_interior(), 0.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0.5, 1.5);
    for (auto& v : d) v = U(rng) * 1e-3;
    const CsrMatrix A = scaled_plus_diagonal(K, 0.1, d);
    std::vector<double> b(A.n), x(A.n, 0.0);
    for (auto& v : b) v = U(rng);
    CgOptions opts;
    opts.dense_fallback_limit = 0;
    const auto stats = cg_solve(A, b, x, opts);
    CHECK(stats.converged);
    CHECK_FALSE(stats.used_direct);
    CHECK(stats.residual <= 1e-12);
    const auto ref = dense_solve(A, b);
    double scale = 0.0;
    for (double v : ref) scale = std::max(scale, std::abs(v));
    CHECK(max_abs_diff(x, ref) / scale <= 1e-8);
  }

  TEST_CASE("CSR helpers") {
    const Grid g = build_grid(1, 0.5, 0.0);
    const auto K = assemble_stiffness(g);
    const std::vector<double> d = {1.0, 2.0, 3.0};
    const auto A = scaled_plus_diagonal(K, 2.0, d);
    CHECK(A.at(0, 0) == doctest::Approx(5.0));
    CHECK(A.at(1, 1) == doctest::Approx(10.0));
    CHECK(A.at(0, 1) == doctest::Approx(-4.0));
    CHECK(A.at(0, 2) == 0.0);
    CHECK(A.diagonal() == std::vector<double>{5.0, 10.0, 7.0});
  }
}

TEST_SUITE("pdas") {
  TEST_CASE("pure solid is stationary with lambda = c_F/2") {
    Small s(12, 0.01);
    const std::vector<double> u_prev(s.grid.num_nodes(), 1.0);
    const std::vector<double> m(s.grid.num_interior(), 0.0);
    for (auto mode : {ConvolutionMode::Explicit, ConvolutionMode::Implicit}) {
      PdasConfig cfg;
      cfg.convolution_mode = mode;
      const auto r = pdas_step_CH(s.grid, s.K, s.st, s.p, s.tau, u_prev, m, cfg);
      CHECK(r.converged);
      CHECK(r.iterations <= 2);
      for (double u : r.u) CHECK(std::abs(u - 1.0) <= 1e-12);
      for (double w : r.w) CHECK(std::abs(w) <= 1e-12);
      for (double l : r.lambda) CHECK(l == doctest::Approx(s.p.c_F / 2).epsilon(1e-10));
    }
  }

  TEST_CASE("PDAS equals exhaustive 3^10 enumeration") {
    for (auto mode : {ConvolutionMode::Explicit, ConvolutionMode::Implicit}) {
      for (double beta : {0.0, 0.01}) {
        const auto c = verify::pdas_vs_enumeration(10, mode, beta, 2, 17);
        INFO(c.name, " ", c.value, " ", c.expected);
        CHECK(c.pass);
        CHECK(c.value <= 1e-9);
      }
    }
  }

  TEST_CASE("warm start from the bound pattern reaches the same fixed point") {
    Small s(20, 0.02);
    std::mt19937_64 rng(9);
    PdasConfig cfg;
    for (int t = 0; t < 5; ++t) {
      const auto u_prev = random_u(s.grid.num_nodes(), rng);
      std::vector<double> m(s.grid.num_interior());
      for (auto& v : m) v = 0.4 * (std::uniform_real_distribution<double>(-1, 1)(rng));
      const auto bounds = ActiveSets::from_bounds(s.grid.restrict_interior(u_prev));
      const auto none = ActiveSets::all_inactive(s.grid.num_interior());
      const auto a = pdas_step_CH(s.grid, s.K, s.st, s.p, s.tau, u_prev, m, cfg, &bounds);
      const auto b = pdas_step_CH(s.grid, s.K, s.st, s.p, s.tau, u_prev, m, cfg, &none);
      REQUIRE(a.converged);
      REQUIRE(b.converged);
      CHECK(a.sets == b.sets);
      CHECK(max_abs_diff(a.u, b.u) <= 1e-12);
      CHECK(max_abs_diff(a.w, b.w) <= 1e-12);
    }
  }

  TEST_CASE("active set update rule") {
    const std::vector<double> u = {1.0, 0.0, 0.5, 0.99};
    const std::vector<double> l = {0.1, -0.1, 0.0, 0.0};
    const auto s = update_active_sets(u, l, 1.0);
    CHECK(s.count_upper() == 1);
    CHECK(s.count_lower() == 1);
    CHECK(s.count_inactive() == 2);
  }

  TEST_CASE("complementarity residual") {
    const std::vector<double> one(5, 1.0), pos(5, 0.3);
    CHECK(verify_complementarity(one, pos) == 0.0);
    const std::vector<double> half(5, 0.5), zero(5, 0.0);
    CHECK(verify_complementarity(half, zero) == 0.0);
    const std::vector<double> u = {0.2, 1.0, 0.0};
    const std::vector<double> l = {0.3, -0.1, 0.2};
    CHECK(verify_complementarity(u, l) == doctest::Approx(0.3));
    const std::vector<double> over = {1.25};
    CHECK(verify_complementarity(over, std::vector<double>{0.0}) == doctest::Approx(0.25));
  }

  TEST_CASE("local obstacle: pure liquid stationary, melting, enumeration") {
    const Grid g = build_grid(1, 1.0 / 7, 0.0);  // 8 nodes
    const auto K = assemble_stiffness(g);
    ModelParams p;
    p.mu = 0.01;
    p.alpha = 0.9;
    p.rho = 20.0;
    const double tau = 1e-3, eps = 0.05;
    const std::size_t n = g.num_interior();
    PdasConfig cfg;

    const std::vector<double> zero(n, 0.0);
    const auto r0 = pdas_step_local_obstacle(g, K, p, tau, eps, zero, zero, cfg);
    CHECK(r0.converged);
    for (double u : r0.u) CHECK(u == 0.0);

    std::mt19937_64 rng(12);
    std::vector<double> u_prev(n);
    for (std::size_t i = 0; i < n; ++i) u_prev[i] = i < n / 2 ? 1.0 : 0.4;
    const std::vector<double> hot(n, coupling_m(p, 5.0));
    const auto r1 = pdas_step_local_obstacle(g, K, p, tau, eps, u_prev, hot, cfg);
    CHECK(r1.converged);
    CHECK(lumped_inner_interior(g, r1.u, std::vector<double>(n, 1.0)) <=
          lumped_inner_interior(g, u_prev, std::vector<double>(n, 1.0)) + 1e-14);

    for (int t = 0; t < 4; ++t) {
      const auto up = random_u(n, rng);
      std::vector<double> m(n);
      for (auto& v : m) v = 0.4 * std::uniform_real_distribution<double>(-1, 1)(rng);
      const auto r = pdas_step_local_obstacle(g, K, p, tau, eps, up, m, cfg);
      int feasible = 0;
      const auto ref = enumerate_local(g, p, tau, eps, up, m, feasible);
      REQUIRE(feasible == 1);
      REQUIRE(r.converged);
      CHECK(max_abs_diff(r.u, ref) <= 1e-9);
    }
  }
}

TEST_SUITE("phase_steps") {
  TEST_CASE("Allen-Cahn projection keeps pure phases") {
    Small s(12, 0.0);
    const std::vector<double> theta(s.grid.num_interior(), s.p.theta_e);
    const std::vector<double> zero(s.grid.num_nodes(), 0.0), one(s.grid.num_nodes(), 1.0);
    const auto a = step_phase_AC(s.grid, s.st, s.p, s.tau, zero, theta);
    for (double u : a.u) CHECK(u == 0.0);
    const auto b = step_phase_AC(s.grid, s.st, s.p, s.tau, one, theta);
    for (double u : b.u) CHECK(std::abs(u - 1.0) <= 1e-14);
  }

  TEST_CASE("Allen-Cahn projection equals the beta = 0 enumeration") {
    Small s(10, 0.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> T(0.8, 1.2);
    for (int t = 0; t < 3; ++t) {
      const auto u_prev = random_u(s.grid.num_nodes(), rng);
      std::vector<double> theta(s.grid.num_interior());
      for (auto& v : theta) v = T(rng);
      const auto ac = step_phase_AC(s.grid, s.st, s.p, s.tau, u_prev, theta);
      const auto ref = oracle::enumerate_ch_step(s.grid, s.kernel, s.p, s.tau, u_prev,
                                                 coupling_m(s.p, theta),
                                                 ConvolutionMode::Explicit);
      REQUIRE(ref.feasible_sets == 1);
      CHECK(max_abs_diff(ac.u, ref.u) <= 1e-10);
      CHECK(max_abs_diff(ac.lambda, ref.lambda) <= 1e-10);
    }
  }

  TEST_CASE("Allen-Cahn projection equals PDAS over 50 random steps") {
    const auto c = verify::ac_vs_pdas(50, 3);
    CHECK(c.pass);
    CHECK(c.value <= 1e-10);
  }

  TEST_CASE("local regular step: pure phases and a dense solve") {
    const Grid g = build_grid(1, 1.0 / 15, 0.0);  // 16 nodes
    const auto K = assemble_stiffness(g);
    ModelParams p;
    p.mu = 0.01;
    const double tau = 1e-3, eps = 0.05;
    const std::size_t n = g.num_interior();
    const std::vector<double> theta(n, p.theta_e), zero(n, 0.0), one(n, 1.0);
    for (double u : step_phase_local_regular(g, K, p, tau, eps, zero, theta)) CHECK(u == 0.0);
    for (double u : step_phase_local_regular(g, K, p, tau, eps, one, theta)) {
      CHECK(std::abs(u - 1.0) <= 1e-12);
    }

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> u_prev(n), th(n);
    for (std::size_t i = 0; i < n; ++i) u_prev[i] = U(rng), th[i] = 0.8 + 0.4 * U(rng);
    const auto u = step_phase_local_regular(g, K, p, tau, eps, u_prev, th, 1e-15);
    const auto mass = g.interior_mass();
    Eigen::MatrixXd A = eps * eps * oracle::stiffness_1d(g);
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) {
      A(i, i) += p.mu / tau * mass[i];
      b[i] = mass[i] * (p.mu / tau * u_prev[i] - regular_potential_dF(u_prev[i], coupling_m(p, th[i])));
    }
    const Eigen::VectorXd ref = A.lu().solve(b);
    CHECK(max_abs_diff(u, std::span<const double>(ref.data(), n)) <= 1e-12);
  }
}
