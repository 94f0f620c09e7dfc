#pragma once

#include <span>
#include <vector>

#include "nlpf/grid.hpp"
#include "nlpf/kernel.hpp"

namespace nlpf {

enum class ConvolutionMode { Explicit, Implicit };

/// Translation-invariant quadrature of gamma (*) u on a uniform grid.
///
/// Row `r` of the stencil covers offsets (dx_min .. dx_min + taps - 1, dy);
/// the weight of offset d is gamma(|d| h) h^dim. The trapezoidal halving at
/// the edge of the union domain is applied to the source field through
/// `source_factor` before correlating, so the stored weights are shared by
/// every node.
struct ConvolutionStencil {
  struct Row {
    int dy = 0;
    int dx_min = 0;
    std::vector<double> weights;
  };

  int dim = 1;
  int nx = 0;
  int ny = 1;
  int radius = 0;  // max |offset| along any axis
  std::vector<Row> rows;
  std::vector<double> source_factor;  // union_mass / h^dim per node
  std::vector<double> c_gamma_h;      // per node, = convolve(1)

  double center_weight() const;
  std::size_t num_offsets() const;
  std::size_t num_nodes() const { return source_factor.size(); }
};

/// Throws when delta < h (the stencil would only contain the centre).
ConvolutionStencil build_stencil(const Grid& grid, const KernelSpec& kernel);

/// (gamma (*) u)_j for every node j of the union domain.
std::vector<double> convolve(const ConvolutionStencil& stencil,
                             std::span<const double> u);
void convolve_into(const ConvolutionStencil& stencil, std::span<const double> u,
                   std::span<double> out);

/// Pure nonlocal operator B_h u = c_gamma_h u - gamma (*) u at the interior
/// nodes (interior order). The c_F shift belongs to the potential.
std::vector<double> apply_Bh(const Grid& grid, const ConvolutionStencil& stencil,
                             std::span<const double> u);

struct ExteriorSolveStats {
  int iterations = 0;
  double residual = 0.0;  // max_j |c_j u_j - (gamma (*) u)_j| over exterior
};

/// Closes u on the interaction layer from N_h u = 0 with interior values of
/// `u` held fixed.
///  Explicit: u_j = (gamma (*) u_prev)_j / c_gamma_h_j, j exterior. `u_prev`
///            is the previous level on all nodes.
///  Implicit: solves c_j u_j - (gamma (*) u)_j = 0 on the exterior (CG on the
///            symmetrised system) to `tol`; `u_prev` seeds the iteration.
ExteriorSolveStats exterior_flux_solve(const Grid& grid,
                                       const ConvolutionStencil& stencil,
                                       std::span<double> u,
                                       ConvolutionMode mode,
                                       std::span<const double> u_prev,
                                       double tol = 1e-12);

/// Explicit closure from an already computed gamma (*) u_prev.
void close_exterior_from_convolution(const Grid& grid,
                                     const ConvolutionStencil& stencil,
                                     std::span<const double> conv_prev,
                                     std::span<double> u);

/// Max-norm of N_h u on the exterior nodes.
double exterior_flux_residual(const Grid& grid, const ConvolutionStencil& stencil,
                              std::span<const double> u);

}  // namespace nlpf
