#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "nlpf/linear_solver.hpp"

namespace nlpf {

enum class Region { Interior, Exterior, Union };

/// Uniform tensor grid over the closure of (0,1)^dim surrounded by an
/// interaction layer of `layer` nodes on every side. Nodes are stored
/// x-fastest. Immutable after construction.
struct Grid {
  int dim = 1;
  double h = 0.0;
  double requested_h = 0.0;
  int cells = 0;       // cells per axis inside the unit domain
  int layer = 0;       // exterior nodes per side
  int nx = 0;          // nodes per axis including the layer
  std::vector<int> interior_ids;
  std::vector<int> exterior_ids;
  std::vector<int> interior_index;  // node -> position in interior_ids, or -1
  // Trapezoidal weights: for interior nodes the rule on the closure of the
  // unit domain, for exterior nodes the rule on the union domain.
  std::vector<double> lumped_mass;
  // Trapezoidal weights of the whole union domain; quadrature weights of
  // the convolution and the union inner product.
  std::vector<double> union_mass;

  int n_per_axis() const noexcept { return cells + 1; }
  bool snapped() const noexcept { return h != requested_h; }  // h was rounded to 1/cells
  std::size_t num_nodes() const noexcept { return lumped_mass.size(); }
  std::size_t num_interior() const noexcept { return interior_ids.size(); }
  std::size_t num_exterior() const noexcept { return exterior_ids.size(); }
  int ny() const noexcept { return dim == 2 ? nx : 1; }

  /// Axis indices (ix, iy) of a node; iy = 0 in 1D.
  std::array<int, 2> axis_index(int node) const noexcept {
    return {node % nx, node / nx};
  }
  /// Coordinate of a node along an axis.
  double coord(int node, int axis) const noexcept {
    const auto idx = axis_index(node);
    return (idx[axis] - layer) * h;
  }

  /// Lumped masses of interior nodes, in interior order.
  std::vector<double> interior_mass() const;

  std::vector<double> restrict_interior(std::span<const double> all) const;
  /// Writes interior values into an all-node field.
  void scatter_interior(std::span<const double> interior,
                        std::span<double> all) const;
};

/// Maximum node count accepted by build_grid.
inline constexpr std::size_t kMaxGridNodes = 40'000'000;

/// Builds the grid for mesh size h (snapped to 1/round(1/h)) and
/// interaction radius delta (0 for local models).
Grid build_grid(int dim, double h, double delta);

/// P1 stiffness with natural boundary over the interior nodes (interior
/// order). 2D uses the tensor form K1 (x) M1 + M1 (x) K1 with lumped M1.
using StiffnessMatrix = CsrMatrix;
StiffnessMatrix assemble_stiffness(const Grid& grid);

/// Mass-lumped inner product of two all-node fields restricted to a region.
double lumped_inner(const Grid& grid, std::span<const double> a,
                    std::span<const double> b, Region region = Region::Interior);

/// Same, for fields given in interior order.
double lumped_inner_interior(const Grid& grid, std::span<const double> a,
                             std::span<const double> b);

}  // namespace nlpf
