#include "nlpf/oracles.hpp"

#include <cmath>

#include "nlpf/error.hpp"

namespace nlpf::oracle {

Eigen::MatrixXd convolution_matrix(const Grid& grid, const KernelSpec& kernel) {
  const int n = static_cast<int>(grid.num_nodes());
  Eigen::MatrixXd G(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double r2 = 0.0;
      for (int a = 0; a < grid.dim; ++a) {
        const double d = grid.coord(j, a) - grid.coord(k, a);
        r2 += d * d;
      }
      G(j, k) = kernel_eval(kernel, std::sqrt(r2)) * grid.union_mass[k];
    }
  }
  return G;
}

Eigen::MatrixXd stiffness_1d(const Grid& grid) {
  if (grid.dim != 1) throw Error("stiffness_1d: 1D grid expected");
  const int n = static_cast<int>(grid.num_interior());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e + 1 < n; ++e) {
    K(e, e) += 1.0 / grid.h;
    K(e + 1, e + 1) += 1.0 / grid.h;
    K(e, e + 1) -= 1.0 / grid.h;
    K(e + 1, e) -= 1.0 / grid.h;
  }
  return K;
}

KktSolution enumerate_ch_step(const Grid& grid, const KernelSpec& kernel,
                              const ModelParams& p, double tau,
                              std::span<const double> u_prev_all,
                              std::span<const double> m_prev, ConvolutionMode mode) {
  const int ni = static_cast<int>(grid.num_interior());
  const int na = static_cast<int>(grid.num_nodes());
  if (grid.dim != 1 || ni > 12) throw Error("enumerate_ch_step: small 1D problems only");
  const Eigen::MatrixXd G = convolution_matrix(grid, kernel);
  const Eigen::MatrixXd K = stiffness_1d(grid);
  const Eigen::VectorXd c = G.rowwise().sum();
  Eigen::VectorXd up(na);
  for (int k = 0; k < na; ++k) up[k] = u_prev_all[k];
  const Eigen::VectorXd conv_prev = G * up;
  const bool implicit = mode == ConvolutionMode::Implicit;

  // Unknowns: u on all nodes, then w and lambda on the interior.
  const int N = na + 2 * ni;
  Eigen::MatrixXd A0 = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd b0 = Eigen::VectorXd::Zero(N);
  std::vector<bool> interior(na, false);
  for (int i = 0; i < ni; ++i) interior[grid.interior_ids[i]] = true;

  int ext_row = 0;
  for (int j = 0; j < na; ++j) {
    if (interior[j]) continue;
    // Exterior closure c_j u_j = (G u)_j, lagged in explicit mode.
    const int row = 2 * ni + ext_row++;
    A0(row, j) = c[j];
    if (implicit) {
      for (int k = 0; k < na; ++k) A0(row, k) -= G(j, k);
    } else {
      b0[row] = conv_prev[j];
    }
  }
  for (int i = 0; i < ni; ++i) {
    const int j = grid.interior_ids[i];
    const double m = grid.lumped_mass[j];
    // Mass balance: mu m (u - u_prev) + tau ((M + beta K) w)_i = 0.
    A0(i, j) = p.mu * m;
    A0(i, na + i) += tau * m;
    for (int k = 0; k < ni; ++k) A0(i, na + k) += tau * p.beta * K(i, k);
    b0[i] = p.mu * m * up[j];
    // Chemical potential row (filled per pattern below for active nodes).
    const int row = ni + i;
    A0(row, j) = c[j] - p.c_F;
    if (implicit) {
      for (int k = 0; k < na; ++k) A0(row, k) -= G(j, k);
      b0[row] = p.c_F * m_prev[i] - 0.5 * p.c_F;
    } else {
      b0[row] = p.c_F * m_prev[i] - 0.5 * p.c_F + conv_prev[j];
    }
    A0(row, na + i) = -1.0;
    A0(row, na + ni + i) = 1.0;
  }

  KktSolution best;
  std::vector<int> pattern(ni, 0);  // 0 inactive, 1 upper, 2 lower
  long total = 1;
  for (int i = 0; i < ni; ++i) total *= 3;
  const double tol = 1e-11;
  for (long code = 0; code < total; ++code) {
    long rem = code;
    for (int i = 0; i < ni; ++i) {
      pattern[i] = static_cast<int>(rem % 3);
      rem /= 3;
    }
    Eigen::MatrixXd A = A0;
    Eigen::VectorXd b = b0;
    // Rows: mass balance, chemical potential, exterior closure, then one
    // row per interior node fixing either lambda = 0 or u at its bound.
    const int base = 2 * ni + (na - ni);
    for (int i = 0; i < ni; ++i) {
      const int row = base + i;
      A.row(row).setZero();
      if (pattern[i] == 0) {
        A(row, na + ni + i) = 1.0;  // lambda = 0
      } else {
        A(row, grid.interior_ids[i]) = 1.0;  // u at the bound
        b[row] = pattern[i] == 1 ? 1.0 : 0.0;
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd x = lu.solve(b);
    bool ok = true;
    for (int i = 0; i < ni && ok; ++i) {
      const double u = x[grid.interior_ids[i]];
      const double lam = x[na + ni + i];
      if (pattern[i] == 0) ok = u >= -tol && u <= 1.0 + tol;
      if (pattern[i] == 1) ok = lam >= -tol;
      if (pattern[i] == 2) ok = lam <= tol;
    }
    if (!ok) continue;
    ++best.feasible_sets;
    if (best.feasible_sets == 1) {
      best.u.assign(x.data(), x.data() + na);
      best.w.assign(x.data() + na, x.data() + na + ni);
      best.lambda.assign(x.data() + na + ni, x.data() + N);
    }
  }
  return best;
}

}  // namespace nlpf::oracle
