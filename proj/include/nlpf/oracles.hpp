#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "nlpf/grid.hpp"
#include "nlpf/kernel.hpp"
#include "nlpf/nonlocal_ops.hpp"
#include "nlpf/physics.hpp"

// Brute-force reference computations for small instances. They assemble
// everything densely from the kernel and the node coordinates and share no
// code with the stencil, CG or PDAS paths they are compared against.

namespace nlpf::oracle {

/// G_jk = gamma(|x_j - x_k|) w_k over all nodes, with w the trapezoidal
/// weights of the union domain.
Eigen::MatrixXd convolution_matrix(const Grid& grid, const KernelSpec& kernel);

/// 1D P1 stiffness with natural boundary on the interior nodes.
Eigen::MatrixXd stiffness_1d(const Grid& grid);

struct KktSolution {
  std::vector<double> u;       // all nodes
  std::vector<double> w;       // interior order
  std::vector<double> lambda;  // interior order
  int feasible_sets = 0;       // active-set patterns satisfying the KKT signs
};

/// Solves the nonlocal obstacle step of a 1D problem by trying all 3^N
/// upper/lower/inactive patterns of the N interior nodes. beta = 0 drops the
/// stiffness term of the w equation. Throws if N > 12.
KktSolution enumerate_ch_step(const Grid& grid, const KernelSpec& kernel,
                              const ModelParams& params, double tau,
                              std::span<const double> u_prev_all,
                              std::span<const double> m_prev, ConvolutionMode mode);

}  // namespace nlpf::oracle
