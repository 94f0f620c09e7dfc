#pragma once

#include <cstdint>
#include <vector>

#include "nlpf/nonlocal_ops.hpp"
#include "nlpf/report.hpp"

namespace nlpf::verify {

/// c_gamma closed form against quadrature, second moments and xi of the
/// two reference parameter sets. `c_gamma_scale` multiplies the closed
/// form before comparison (negative control).
std::vector<ThresholdCheck> kernel_checks(double c_gamma_scale = 1.0);

/// Stencil convolution against the dense quadrature matrix.
ThresholdCheck convolution_vs_dense(int dim, int cells, double delta_in_cells);

/// Vector kernels against the scalar reference on the same convolution.
ThresholdCheck simd_equivalence();

/// Direct Allen-Cahn projection against PDAS at beta = 0 with lagged
/// convolution, over random feasible states.
ThresholdCheck ac_vs_pdas(int instances, std::uint64_t seed = 1);

/// PDAS against exhaustive 3^N active-set enumeration (1D, N interior nodes).
ThresholdCheck pdas_vs_enumeration(int n_interior, ConvolutionMode mode, double beta,
                                   int instances, std::uint64_t seed = 2);

/// L = 0, theta0 = cos(pi x) on 64 nodes against (1 + tau D lambda_h)^-k.
ThresholdCheck heat_eigen_decay(int steps = 10);

/// beta = 0 step-size bound with the first reference set, C_I = 0.
ThresholdCheck admissibility_example1();

/// Steps the first reference set (beta > 0) with implicit convolution:
/// max |u - P(g / xi)| with g = w + gamma (*) u + c_F m_prev - c_F/2, and the
/// worst per-step change of J_k. `steps` <= 0 runs to the final time.
std::vector<ThresholdCheck> implicit_step_checks(int steps = 0);

struct Options {
  double c_gamma_scale = 1.0;
};

/// Everything above at desk-scale sizes.
std::vector<ThresholdCheck> run_all(const Options& options = {});

}  // namespace nlpf::verify
