#include "nlpf/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "nlpf/error.hpp"

namespace nlpf {

std::vector<LineInterface> line_interfaces(std::span<const double> v, double tol) {
  std::vector<LineInterface> out;
  const int n = static_cast<int>(v.size());
  auto phase = [&](double x) { return x <= tol ? -1 : (x >= 1.0 - tol ? 1 : 0); };
  int c = 0;
  while (c < n - 1) {
    const int a = phase(v[c]);
    const int b = phase(v[c + 1]);
    if (a != 0 && a == b) {
      ++c;
      continue;
    }
    LineInterface run;
    run.first_cell = c;
    while (c < n - 1) {
      const int pa = phase(v[c]);
      const int pb = phase(v[c + 1]);
      if (pa != 0 && pa == pb) break;
      ++run.span;
      if (pa == 0 && pb == 0) ++run.width;
      if (pa != 0 && pb != 0) ++run.width;  // direct jump between the phases
      ++c;
      // A jump cell ends at a pure node; the run continues only through
      // intermediate nodes.
      if (phase(v[c]) != 0) break;
    }
    const int left = phase(v[run.first_cell]);
    const int right = phase(v[run.first_cell + run.span]);
    run.transition = left != 0 && right != 0 && left != right;
    out.push_back(run);
  }
  return out;
}

InterfaceReport interface_width(const Grid& grid, std::span<const double> u, double tol) {
  if (u.size() != grid.num_interior()) throw Error("interface_width: field does not match grid");
  InterfaceReport rep;
  rep.tol = tol;
  const int n1 = grid.n_per_axis();
  std::vector<int> all_widths;
  std::vector<int> transitions;
  const double max_slope = std::tan(kNormalAngle);

  auto at = [&](int x, int y) {
    x = std::clamp(x, 0, n1 - 1);
    y = std::clamp(y, 0, n1 - 1);
    return u[static_cast<std::size_t>(y) * n1 + x];
  };
  // Central differences along and across the line must favour the line
  // direction at the first, middle (closest to u = 1/2) and last
  // intermediate node of the run. `axis` 0 scans rows, 1 scans columns.
  auto near_normal = [&](const LineInterface& run, std::span<const double> line, int index,
                         int axis) {
    auto aligned = [&](int k) {
      const int x = axis == 0 ? k : index;
      const int y = axis == 0 ? index : k;
      const double gx = at(x + 1, y) - at(x - 1, y);
      const double gy = at(x, y + 1) - at(x, y - 1);
      const double along = axis == 0 ? gx : gy;
      const double across = axis == 0 ? gy : gx;
      return std::abs(across) <= max_slope * std::abs(along);
    };
    const int first = run.first_cell;
    const int last = run.first_cell + run.span;
    int lo = first + 1, hi = last - 1;
    if (lo > hi) return aligned(std::abs(line[first] - 0.5) < std::abs(line[last] - 0.5) ? first
                                                                                          : last);
    int mid = lo;
    for (int k = lo; k <= hi; ++k) {
      if (std::abs(line[k] - 0.5) < std::abs(line[mid] - 0.5)) mid = k;
    }
    return aligned(lo) && aligned(mid) && aligned(hi);
  };

  auto scan = [&](std::span<const double> line, int index, int axis) {
    bool has_transition = false;
    for (const auto& run : line_interfaces(line, tol)) {
      all_widths.push_back(run.width);
      if (run.transition) {
        transitions.push_back(run.width);
        has_transition = true;
        if (grid.dim == 1 || near_normal(run, line, index, axis)) {
          rep.normal_widths.push_back(run.width);
        }
      }
    }
    if (has_transition) ++rep.lines_with_transition;
  };

  if (grid.dim == 1) {
    scan(u, 0, 0);
    rep.widths = all_widths;
  } else {
    std::vector<double> line(n1);
    for (int y = 0; y < n1; ++y) {
      for (int x = 0; x < n1; ++x) line[x] = at(x, y);
      scan(line, y, 0);
    }
    for (int x = 0; x < n1; ++x) {
      for (int y = 0; y < n1; ++y) line[y] = at(x, y);
      scan(line, x, 1);
    }
    rep.widths = transitions;
  }
  if (!rep.normal_widths.empty()) {
    const auto [lo, hi] = std::minmax_element(rep.normal_widths.begin(), rep.normal_widths.end());
    rep.normal_min_width = *lo;
    rep.normal_max_width = *hi;
  }

  std::vector<int> pool = transitions.empty() ? all_widths : transitions;
  if (!pool.empty()) {
    std::sort(pool.begin(), pool.end());
    rep.min_width = pool.front();
    rep.max_width = pool.back();
    const std::size_t m = pool.size() / 2;
    rep.median_width = pool.size() % 2 ? pool[m] : 0.5 * (pool[m - 1] + pool[m]);
  }

  for (std::size_t i = 0; i < u.size(); ++i) {
    const double m = grid.lumped_mass[grid.interior_ids[i]];
    if (u[i] >= 1.0 - tol) rep.solid_fraction += m;
    else if (u[i] <= tol) rep.liquid_fraction += m;
  }
  return rep;
}

double field_distance(const Grid& a, std::span<const double> u_a, const Grid& b,
                      std::span<const double> u_b) {
  if (a.dim != b.dim || a.cells != b.cells) {
    throw Error("field_distance: grids describe different interiors");
  }
  return field_distance(a, u_a, u_b);
}

double field_distance(const Grid& grid, std::span<const double> u_a,
                      std::span<const double> u_b) {
  if (u_a.size() != grid.num_interior() || u_b.size() != grid.num_interior()) {
    throw Error("field_distance: field does not match grid");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < u_a.size(); ++i) {
    const double d = u_a[i] - u_b[i];
    s += grid.lumped_mass[grid.interior_ids[i]] * d * d;
  }
  return std::sqrt(s);
}

}  // namespace nlpf
