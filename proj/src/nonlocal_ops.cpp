#include "nlpf/nonlocal_ops.hpp"

#include <algorithm>
#include <cmath>

#include "nlpf/error.hpp"
#include "nlpf/simd.hpp"

namespace nlpf {

double ConvolutionStencil::center_weight() const {
  for (const auto& row : rows) {
    if (row.dy == 0) return row.weights[-row.dx_min];
  }
  return 0.0;
}

std::size_t ConvolutionStencil::num_offsets() const {
  std::size_t n = 0;
  for (const auto& row : rows) n += row.weights.size();
  return n;
}

ConvolutionStencil build_stencil(const Grid& grid, const KernelSpec& kernel) {
  if (kernel.dim() != grid.dim) throw Error("kernel and grid dimensions differ");
  const double h = grid.h;
  if (kernel.delta() < h) {
    throw Error("interaction radius delta < h: the stencil has no neighbours");
  }
  if (grid.layer * h < kernel.delta() * (1.0 - 1e-12)) {
    throw Error("grid interaction layer does not cover delta");
  }

  ConvolutionStencil st;
  st.dim = grid.dim;
  st.nx = grid.nx;
  st.ny = grid.ny();
  const double cell = grid.dim == 1 ? h : h * h;

  // Offsets with gamma > 0 satisfy |d| h < delta.
  const int reach = static_cast<int>(std::ceil(kernel.delta() / h));
  auto weight = [&](int dx, int dy) {
    const double r = h * std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy);
    return kernel_eval(kernel, r) * cell;
  };
  const int dy_reach = grid.dim == 2 ? reach : 0;
  for (int dy = -dy_reach; dy <= dy_reach; ++dy) {
    int lo = 0;
    while (lo < reach && weight(lo + 1, dy) > 0.0) ++lo;
    if (weight(0, dy) <= 0.0) continue;
    ConvolutionStencil::Row row;
    row.dy = dy;
    row.dx_min = -lo;
    for (int dx = -lo; dx <= lo; ++dx) row.weights.push_back(weight(dx, dy));
    st.radius = std::max({st.radius, lo, std::abs(dy)});
    st.rows.push_back(std::move(row));
  }

  st.source_factor.resize(grid.num_nodes());
  for (std::size_t i = 0; i < grid.num_nodes(); ++i) {
    st.source_factor[i] = grid.union_mass[i] / cell;
  }
  const std::vector<double> ones(grid.num_nodes(), 1.0);
  st.c_gamma_h = convolve(st, ones);
  return st;
}

void convolve_into(const ConvolutionStencil& st, std::span<const double> u,
                   std::span<double> out) {
  if (u.size() != st.num_nodes() || out.size() != st.num_nodes()) {
    throw Error("convolve: field size does not match stencil");
  }
  const auto& k = simd::active();
  const int R = st.radius;
  const int width = st.nx + 2 * R;
  const int height = st.dim == 2 ? st.ny + 2 * R : 1;
  const int pad_y = st.dim == 2 ? R : 0;

  std::vector<double> padded(static_cast<std::size_t>(width) * height, 0.0);
  for (int y = 0; y < st.ny; ++y) {
    double* dst = padded.data() + static_cast<std::size_t>(y + pad_y) * width + R;
    const std::size_t base = static_cast<std::size_t>(y) * st.nx;
    for (int x = 0; x < st.nx; ++x) dst[x] = st.source_factor[base + x] * u[base + x];
  }
  std::fill(out.begin(), out.end(), 0.0);

  if (st.dim == 1) {
    const auto& row = st.rows.front();
    const int taps = static_cast<int>(row.weights.size());
    simd::parallel_for(static_cast<std::size_t>(st.nx), [&](std::size_t b, std::size_t e) {
      k.correlate_accumulate(padded.data() + b + (R + row.dx_min), row.weights.data(),
                             taps, out.data() + b, e - b);
    });
    return;
  }
  simd::parallel_for(static_cast<std::size_t>(st.ny), [&](std::size_t b, std::size_t e) {
    for (std::size_t y = b; y < e; ++y) {
      double* dst = out.data() + y * st.nx;
      for (const auto& row : st.rows) {
        const double* src = padded.data() +
                            (y + pad_y + row.dy) * static_cast<std::size_t>(width) +
                            (R + row.dx_min);
        k.correlate_accumulate(src, row.weights.data(),
                               static_cast<int>(row.weights.size()), dst,
                               static_cast<std::size_t>(st.nx));
      }
    }
  });
}

std::vector<double> convolve(const ConvolutionStencil& st, std::span<const double> u) {
  std::vector<double> out(st.num_nodes());
  convolve_into(st, u, out);
  return out;
}

std::vector<double> apply_Bh(const Grid& grid, const ConvolutionStencil& st,
                             std::span<const double> u) {
  const auto conv = convolve(st, u);
  std::vector<double> out(grid.num_interior());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int id = grid.interior_ids[i];
    out[i] = st.c_gamma_h[id] * u[id] - conv[id];
  }
  return out;
}

void close_exterior_from_convolution(const Grid& grid, const ConvolutionStencil& st,
                                     std::span<const double> conv_prev,
                                     std::span<double> u) {
  for (int id : grid.exterior_ids) {
    const double c = st.c_gamma_h[id];
    if (!(c > 0.0)) throw Error("exterior node outside the kernel reach (c_gamma_h = 0)");
    u[id] = conv_prev[id] / c;
  }
}

double exterior_flux_residual(const Grid& grid, const ConvolutionStencil& st,
                              std::span<const double> u) {
  const auto conv = convolve(st, u);
  double r = 0.0;
  for (int id : grid.exterior_ids) {
    r = std::max(r, std::abs(st.c_gamma_h[id] * u[id] - conv[id]));
  }
  return r;
}

namespace {

// Exterior block scaled by the source factors f:
//   f_j c_j u_j - f_j (gamma (*) u)_j,  j, k exterior,
// is symmetric and (irreducibly) diagonally dominant, hence SPD.
ExteriorSolveStats solve_exterior_cg(const Grid& grid, const ConvolutionStencil& st,
                                     std::span<double> u, double tol) {
  const auto& k = simd::active();
  const auto& ext = grid.exterior_ids;
  const std::size_t ne = ext.size();
  const std::size_t nn = grid.num_nodes();
  ExteriorSolveStats stats;
  if (ne == 0) return stats;

  for (int id : ext) {
    if (!(st.c_gamma_h[id] > 0.0)) {
      throw Error("exterior node outside the kernel reach (c_gamma_h = 0)");
    }
  }

  std::vector<double> field(nn), conv(nn);
  auto apply = [&](std::span<const double> v, std::span<double> out) {
    std::fill(field.begin(), field.end(), 0.0);
    for (std::size_t e = 0; e < ne; ++e) field[ext[e]] = v[e];
    convolve_into(st, field, conv);
    for (std::size_t e = 0; e < ne; ++e) {
      const int id = ext[e];
      out[e] = st.source_factor[id] * (st.c_gamma_h[id] * v[e] - conv[id]);
    }
  };

  // Right-hand side: interior contributions f_j (gamma (*) u_interior)_j.
  std::fill(field.begin(), field.end(), 0.0);
  for (int id : grid.interior_ids) field[id] = u[id];
  convolve_into(st, field, conv);
  std::vector<double> b(ne), x(ne), diag(ne);
  const double w0 = st.center_weight();
  for (std::size_t e = 0; e < ne; ++e) {
    const int id = ext[e];
    b[e] = st.source_factor[id] * conv[id];
    x[e] = u[id];
    diag[e] = st.source_factor[id] *
              (st.c_gamma_h[id] - w0 * st.source_factor[id]);
  }

  // Stopping uses the unscaled nodal residual |c_j u_j - (gamma (*) u)_j|.
  std::vector<double> r(ne), z(ne), p(ne), q(ne);
  auto nodal_residual = [&] {
    double m = 0.0;
    for (std::size_t e = 0; e < ne; ++e) {
      m = std::max(m, std::abs(r[e]) / st.source_factor[ext[e]]);
    }
    return m;
  };
  apply(x, q);
  for (std::size_t e = 0; e < ne; ++e) r[e] = b[e] - q[e];
  double res = nodal_residual();
  const int max_iters = static_cast<int>(std::min<std::size_t>(10 * ne + 100, 20000));
  for (int restart = 0; restart < 4 && res > tol; ++restart) {
    for (std::size_t e = 0; e < ne; ++e) z[e] = r[e] / diag[e];
    p = z;
    double rz = k.dot(r.data(), z.data(), ne);
    while (res > tol && stats.iterations < max_iters) {
      apply(p, q);
      const double pq = k.dot(p.data(), q.data(), ne);
      if (!(pq > 0.0)) break;
      const double alpha = rz / pq;
      k.axpy(alpha, p.data(), x.data(), ne);
      k.axpy(-alpha, q.data(), r.data(), ne);
      for (std::size_t e = 0; e < ne; ++e) z[e] = r[e] / diag[e];
      const double rz_new = k.dot(r.data(), z.data(), ne);
      k.xpby(z.data(), rz_new / rz, p.data(), ne);
      rz = rz_new;
      res = nodal_residual();
      ++stats.iterations;
    }
    apply(x, q);
    for (std::size_t e = 0; e < ne; ++e) r[e] = b[e] - q[e];
    res = nodal_residual();
  }
  for (std::size_t e = 0; e < ne; ++e) u[ext[e]] = x[e];
  stats.residual = res;
  if (res > tol) {
    throw Error("exterior flux solve did not reach tolerance (residual " +
                std::to_string(res) + ")");
  }
  return stats;
}

}  // namespace

ExteriorSolveStats exterior_flux_solve(const Grid& grid, const ConvolutionStencil& st,
                                       std::span<double> u, ConvolutionMode mode,
                                       std::span<const double> u_prev, double tol) {
  if (mode == ConvolutionMode::Explicit) {
    const auto conv = convolve(st, u_prev);
    close_exterior_from_convolution(grid, st, conv, u);
    return {};
  }
  for (int id : grid.exterior_ids) u[id] = u_prev[id];
  return solve_exterior_cg(grid, st, u, tol);
}

}  // namespace nlpf
