#include "nlpf/grid.hpp"

#include <algorithm>
#include <cmath>

#include "nlpf/error.hpp"

namespace nlpf {

std::vector<double> Grid::interior_mass() const {
  std::vector<double> m(interior_ids.size());
  for (std::size_t i = 0; i < interior_ids.size(); ++i) {
    m[i] = lumped_mass[interior_ids[i]];
  }
  return m;
}

std::vector<double> Grid::restrict_interior(std::span<const double> all) const {
  std::vector<double> out(interior_ids.size());
  for (std::size_t i = 0; i < interior_ids.size(); ++i) out[i] = all[interior_ids[i]];
  return out;
}

void Grid::scatter_interior(std::span<const double> interior,
                            std::span<double> all) const {
  for (std::size_t i = 0; i < interior_ids.size(); ++i) {
    all[interior_ids[i]] = interior[i];
  }
}

Grid build_grid(int dim, double h, double delta) {
  if (dim != 1 && dim != 2) throw Error("grid dimension must be 1 or 2");
  if (!(h > 0.0) || !(h < 1.0)) throw Error("mesh size h must satisfy 0 < h < 1");
  if (!(delta >= 0.0)) throw Error("interaction radius must be >= 0");

  Grid g;
  g.dim = dim;
  g.requested_h = h;
  g.cells = static_cast<int>(std::lround(1.0 / h));
  if (g.cells < 1) throw Error("mesh size too large");
  g.h = 1.0 / g.cells;
  g.layer = delta > 0.0
                ? static_cast<int>(std::ceil(delta / g.h - 1e-9))
                : 0;
  g.nx = g.cells + 1 + 2 * g.layer;

  const std::size_t total =
      dim == 1 ? static_cast<std::size_t>(g.nx)
               : static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.nx);
  if (total > kMaxGridNodes) {
    throw Error("grid with " + std::to_string(total) +
                " nodes exceeds the memory budget");
  }

  const int lo = g.layer;
  const int hi = g.layer + g.cells;
  auto union_factor = [&](int i) {
    return (i == 0 || i == g.nx - 1) ? 0.5 * g.h : g.h;
  };
  auto domain_factor = [&](int i) { return (i == lo || i == hi) ? 0.5 * g.h : g.h; };
  auto inside = [&](int i) { return i >= lo && i <= hi; };

  g.lumped_mass.resize(total);
  g.union_mass.resize(total);
  g.interior_index.assign(total, -1);
  for (std::size_t node = 0; node < total; ++node) {
    const auto idx = g.axis_index(static_cast<int>(node));
    bool interior = inside(idx[0]);
    double um = union_factor(idx[0]);
    double dm = domain_factor(idx[0]);
    if (dim == 2) {
      interior = interior && inside(idx[1]);
      um *= union_factor(idx[1]);
      dm *= domain_factor(idx[1]);
    }
    g.union_mass[node] = um;
    if (interior) {
      g.interior_index[node] = static_cast<int>(g.interior_ids.size());
      g.interior_ids.push_back(static_cast<int>(node));
      g.lumped_mass[node] = dm;
    } else {
      g.exterior_ids.push_back(static_cast<int>(node));
      g.lumped_mass[node] = um;
    }
  }
  return g;
}

namespace {

// 1D lumped P1 pieces on n nodes with spacing h.
std::vector<double> mass_1d(int n, double h) {
  std::vector<double> m(n, h);
  m.front() *= 0.5;
  m.back() *= 0.5;
  return m;
}

double stiff_1d(int n, double h, int i, int j) {
  if (std::abs(i - j) > 1) return 0.0;
  if (i != j) return -1.0 / h;
  return (i == 0 || i == n - 1) ? 1.0 / h : 2.0 / h;
}

}  // namespace

StiffnessMatrix assemble_stiffness(const Grid& grid) {
  const int n1 = grid.n_per_axis();
  const double h = grid.h;
  StiffnessMatrix K;
  if (grid.dim == 1) {
    K.n = n1;
    K.row_ptr.push_back(0);
    for (int i = 0; i < n1; ++i) {
      for (int j = std::max(0, i - 1); j <= std::min(n1 - 1, i + 1); ++j) {
        K.cols.push_back(j);
        K.vals.push_back(stiff_1d(n1, h, i, j));
      }
      K.row_ptr.push_back(K.cols.size());
    }
    return K;
  }

  const auto m1 = mass_1d(n1, h);
  K.n = static_cast<std::size_t>(n1) * n1;
  K.row_ptr.push_back(0);
  for (int iy = 0; iy < n1; ++iy) {
    for (int ix = 0; ix < n1; ++ix) {
      // Neighbours in increasing column order: (ix, iy-1), (ix-1, iy),
      // (ix, iy), (ix+1, iy), (ix, iy+1).
      const int nbr[5][2] = {{ix, iy - 1}, {ix - 1, iy}, {ix, iy}, {ix + 1, iy}, {ix, iy + 1}};
      for (const auto& p : nbr) {
        const int jx = p[0], jy = p[1];
        if (jx < 0 || jx >= n1 || jy < 0 || jy >= n1) continue;
        double v = 0.0;
        if (jy == iy) v += stiff_1d(n1, h, ix, jx) * m1[iy];
        if (jx == ix) v += m1[ix] * stiff_1d(n1, h, iy, jy);
        K.cols.push_back(jy * n1 + jx);
        K.vals.push_back(v);
      }
      K.row_ptr.push_back(K.cols.size());
    }
  }
  return K;
}

double lumped_inner(const Grid& grid, std::span<const double> a,
                    std::span<const double> b, Region region) {
  if (a.size() != grid.num_nodes() || b.size() != grid.num_nodes()) {
    throw Error("lumped_inner: field size does not match grid");
  }
  double sum = 0.0;
  switch (region) {
    case Region::Interior:
      for (int id : grid.interior_ids) sum += grid.lumped_mass[id] * a[id] * b[id];
      break;
    case Region::Exterior:
      for (int id : grid.exterior_ids) sum += grid.lumped_mass[id] * a[id] * b[id];
      break;
    case Region::Union:
      for (std::size_t i = 0; i < a.size(); ++i) sum += grid.union_mass[i] * a[i] * b[i];
      break;
  }
  return sum;
}

double lumped_inner_interior(const Grid& grid, std::span<const double> a,
                             std::span<const double> b) {
  if (a.size() != grid.num_interior() || b.size() != grid.num_interior()) {
    throw Error("lumped_inner_interior: field size does not match grid");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += grid.lumped_mass[grid.interior_ids[i]] * a[i] * b[i];
  }
  return sum;
}

}  // namespace nlpf
