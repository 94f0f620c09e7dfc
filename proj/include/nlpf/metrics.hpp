#pragma once

#include <span>
#include <vector>

#include "nlpf/grid.hpp"

namespace nlpf {

/// Widths, in grid cells, of the diffuse region tol < u < 1 - tol.
///
/// Along a grid line, cells whose end nodes are not both in the same pure
/// phase (<= tol or >= 1 - tol) form runs; runs end at pure nodes. The
/// width of a run counts its cells with both end values in (tol, 1 - tol)
/// plus cells that jump directly between the two pure phases, so a profile
/// with q intermediate nodes has width q - 1 and an exact step width 1.
/// A run is a transition when the nodes bounding it are in opposite pure
/// phases. min/max are taken over transitions when any exist, otherwise
/// over all runs.
inline constexpr double kNormalAngle = 0.39269908169872414;  // 22.5 degrees
struct InterfaceReport {
  double tol = 1e-3;
  int min_width = 0;
  int max_width = 0;
  double median_width = 0.0;
  std::vector<int> widths;       // transitions (1D: every interface, in order)
  std::size_t lines_with_transition = 0;
  // 2D: transitions whose line meets the interface within kNormalAngle of
  // its normal, so oblique cuts near curved parts do not inflate the range.
  // 1D: same as the transition statistics.
  int normal_min_width = 0;
  int normal_max_width = 0;
  std::vector<int> normal_widths;
  double solid_fraction = 0.0;   // lumped measure of {u >= 1 - tol}
  double liquid_fraction = 0.0;  // lumped measure of {u <= tol}
};

/// `u` is an interior-order field.
InterfaceReport interface_width(const Grid& grid, std::span<const double> u,
                                double tol = 1e-3);

/// Width runs of a single line of nodal values (exposed for testing).
struct LineInterface {
  int first_cell = 0;
  int span = 0;   // cells in the run
  int width = 0;  // counted cells as described above
  bool transition = false;
};
std::vector<LineInterface> line_interfaces(std::span<const double> values, double tol);

/// sqrt(sum_j m_j (a_j - b_j)^2) over interior nodes; fields in interior
/// order. Throws when the two grids do not describe the same interior.
double field_distance(const Grid& grid_a, std::span<const double> u_a,
                      const Grid& grid_b, std::span<const double> u_b);
double field_distance(const Grid& grid, std::span<const double> u_a,
                      std::span<const double> u_b);

}  // namespace nlpf
