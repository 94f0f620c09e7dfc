#include "nlpf/pdas.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <functional>

#include "nlpf/error.hpp"

namespace nlpf {

ActiveSets ActiveSets::all_inactive(std::size_t n) {
  return ActiveSets{std::vector<std::int8_t>(n, 0)};
}

ActiveSets ActiveSets::from_bounds(std::span<const double> u) {
  ActiveSets s = all_inactive(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] >= 1.0) s.state[i] = 1;
    else if (u[i] <= 0.0) s.state[i] = -1;
  }
  return s;
}

std::size_t ActiveSets::count_upper() const {
  return static_cast<std::size_t>(std::count(state.begin(), state.end(), 1));
}
std::size_t ActiveSets::count_lower() const {
  return static_cast<std::size_t>(std::count(state.begin(), state.end(), -1));
}

ActiveSets update_active_sets(std::span<const double> u, std::span<const double> lambda,
                              double c) {
  ActiveSets s = ActiveSets::all_inactive(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (lambda[i] + c * (u[i] - 1.0) > 0.0) s.state[i] = 1;
    else if (lambda[i] + c * u[i] < 0.0) s.state[i] = -1;
  }
  return s;
}

void PdasConfig::validate() const {
  if (!(c_penalty >= 0.0)) throw Error("pdas: c_penalty must be >= 0 (0 selects it automatically)");
  if (max_iters < 1) throw Error("pdas: max_iters must be >= 1");
  if (!(lin_tol > 0.0)) throw Error("pdas: lin_tol must be > 0");
}

double verify_complementarity(std::span<const double> u, std::span<const double> lambda) {
  double r = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double lp = std::max(lambda[i], 0.0);
    const double lm = std::max(-lambda[i], 0.0);
    r = std::max({r, std::abs(std::min(lp, 1.0 - u[i])), std::abs(std::min(lm, u[i])),
                  u[i] - 1.0, -u[i]});
  }
  return r;
}

namespace {

struct Iterate {
  std::vector<double> u_int;
  std::vector<double> u_all;
  std::vector<double> w;
  std::vector<double> lambda;
  double lin_residual = 0.0;
};

double bound_of(std::int8_t s) { return s > 0 ? 1.0 : 0.0; }

// `diag_scale` is the largest diagonal of the system in multiplier units. A
// smaller c lets a node jump between the two bounds in one update, which
// cycles on stiff local problems.
PdasResult run_pdas(std::size_t n_interior, const PdasConfig& config, double diag_scale,
                    ActiveSets sets, const std::function<Iterate(const ActiveSets&)>& solve) {
  config.validate();
  const double c = config.c_penalty > 0.0 ? config.c_penalty : diag_scale;
  PdasResult result;
  Iterate it;
  for (int k = 1; k <= config.max_iters; ++k) {
    it = solve(sets);
    for (std::size_t i = 0; i < n_interior; ++i) {
      if (sets.state[i] == 0) it.lambda[i] = 0.0;
    }
    result.iterations = k;
    result.lin_residual = std::max(result.lin_residual, it.lin_residual);
    ActiveSets next = update_active_sets(it.u_int, it.lambda, c);
    if (next == sets) {
      result.converged = true;
      break;
    }
    sets = std::move(next);
  }
  result.u = std::move(it.u_all);
  result.w = std::move(it.w);
  result.lambda = std::move(it.lambda);
  result.sets = std::move(sets);
  return result;
}

using SpMat = Eigen::SparseMatrix<double>;
using RowMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

constexpr std::size_t kMaxImplicitNonzeros = 20'000'000;

// Triplets of the convolution matrix (gamma (*) u)_j = sum_k G_jk u_k.
void append_convolution(const ConvolutionStencil& st, int row_offset, double scale,
                        std::vector<Triplet>& out, const std::vector<int>& row_nodes) {
  for (std::size_t r = 0; r < row_nodes.size(); ++r) {
    const int node = row_nodes[r];
    const int x = node % st.nx;
    const int y = node / st.nx;
    for (const auto& row : st.rows) {
      const int sy = y + row.dy;
      if (sy < 0 || sy >= st.ny) continue;
      for (std::size_t t = 0; t < row.weights.size(); ++t) {
        const int sx = x + row.dx_min + static_cast<int>(t);
        if (sx < 0 || sx >= st.nx) continue;
        const int src = sy * st.nx + sx;
        out.emplace_back(row_offset + static_cast<int>(r), src,
                         scale * row.weights[t] * st.source_factor[src]);
      }
    }
  }
}

std::vector<double> sparse_lu_solve(const SpMat& A, const Eigen::VectorXd& b,
                                    double& rel_residual) {
  Eigen::SparseLU<SpMat> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw Error("PDAS inner solver breakdown (sparse LU)");
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw Error("PDAS inner solver breakdown (sparse LU solve)");
  }
  const double bn = std::max(b.norm(), 1e-300);
  rel_residual = (A * x - b).norm() / bn;
  return {x.data(), x.data() + x.size()};
}

void check_inputs(const Grid& grid, std::span<const double> u_prev,
                  std::span<const double> m_prev, double tau) {
  if (!(tau > 0.0)) throw Error("time step must be > 0");
  if (u_prev.size() != grid.num_nodes()) throw Error("u_prev does not match grid");
  if (m_prev.size() != grid.num_interior()) throw Error("m_prev does not match grid");
}

}  // namespace

PdasResult pdas_step_CH(const Grid& grid, const StiffnessMatrix& K,
                        const ConvolutionStencil& st, const ModelParams& p, double tau,
                        std::span<const double> u_prev, std::span<const double> m_prev,
                        const PdasConfig& config, const ActiveSets* warm_start) {
  check_inputs(grid, u_prev, m_prev, tau);
  const std::size_t n = grid.num_interior();
  const std::size_t nn = grid.num_nodes();
  const auto mass = grid.interior_mass();
  const auto u_prev_int = grid.restrict_interior(u_prev);

  std::vector<double> xi_h(n), rhs_r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int id = grid.interior_ids[i];
    xi_h[i] = st.c_gamma_h[id] - p.c_F;
    rhs_r[i] = p.c_F * m_prev[i] - 0.5 * p.c_F;
  }
  ActiveSets init = warm_start ? *warm_start : ActiveSets::from_bounds(u_prev_int);
  if (init.size() != n) throw Error("warm-start active sets do not match grid");
  const double diag_scale = p.mu / tau + *std::max_element(xi_h.begin(), xi_h.end());

  if (config.convolution_mode == ConvolutionMode::Explicit) {
    for (double x : xi_h) {
      if (!(x > 0.0)) throw Error("explicit PDAS step requires xi_h > 0 at every interior node");
    }
    const auto conv_prev = convolve(st, u_prev);
    std::vector<double> r_tilde(n);
    for (std::size_t i = 0; i < n; ++i) r_tilde[i] = conv_prev[grid.interior_ids[i]] + rhs_r[i];

    std::vector<double> u_closed(u_prev.begin(), u_prev.end());
    close_exterior_from_convolution(grid, st, conv_prev, u_closed);
    std::vector<double> w(n, 0.0);

    auto solve = [&](const ActiveSets& sets) {
      std::vector<double> diag(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        const bool inactive = sets.state[i] == 0;
        diag[i] = tau * mass[i] + (inactive ? p.mu * mass[i] / xi_h[i] : 0.0);
        const double known = inactive ? r_tilde[i] / xi_h[i] : bound_of(sets.state[i]);
        b[i] = p.mu * mass[i] * (u_prev_int[i] - known);
      }
      const CsrMatrix A = scaled_plus_diagonal(K, tau * p.beta, diag);
      CgOptions opts;
      opts.rel_tol = config.lin_tol;
      const auto stats = cg_solve(A, b, w, opts);
      if (!stats.converged) {
        throw Error("PDAS inner solver breakdown: CG stopped at relative residual " +
                    std::to_string(stats.residual) + " after " +
                    std::to_string(stats.iterations) + " iterations");
      }
      Iterate it;
      it.u_int.resize(n);
      it.lambda.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        it.u_int[i] = sets.state[i] == 0 ? (w[i] + r_tilde[i]) / xi_h[i] : bound_of(sets.state[i]);
        it.lambda[i] = w[i] + r_tilde[i] - xi_h[i] * it.u_int[i];
      }
      it.u_all = u_closed;
      grid.scatter_interior(it.u_int, it.u_all);
      it.w = w;
      it.lin_residual = stats.residual;
      return it;
    };
    return run_pdas(n, config, diag_scale, std::move(init), solve);
  }

  // Implicit: unknowns [u on all nodes, w on interior nodes].
  const std::size_t nnz_estimate = nn * st.num_offsets();
  if (nnz_estimate > kMaxImplicitNonzeros) {
    throw Error("implicit convolution system too large; use explicit mode");
  }
  std::vector<int> all_nodes(nn);
  for (std::size_t j = 0; j < nn; ++j) all_nodes[j] = static_cast<int>(j);
  std::vector<Triplet> conv_triplets;
  conv_triplets.reserve(nnz_estimate);
  append_convolution(st, 0, 1.0, conv_triplets, all_nodes);
  RowMat G(nn, nn);
  G.setFromTriplets(conv_triplets.begin(), conv_triplets.end());

  const int N = static_cast<int>(nn + n);
  auto solve = [&](const ActiveSets& sets) {
    std::vector<Triplet> t;
    t.reserve(conv_triplets.size() + 8 * n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
    for (int id : grid.exterior_ids) {
      t.emplace_back(id, id, st.c_gamma_h[id]);
      for (RowMat::InnerIterator itg(G, id); itg; ++itg) t.emplace_back(id, itg.col(), -itg.value());
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int id = grid.interior_ids[i];
      const int wcol = static_cast<int>(nn + i);
      if (sets.state[i] == 0) {
        t.emplace_back(id, id, st.c_gamma_h[id] - p.c_F);
        for (RowMat::InnerIterator itg(G, id); itg; ++itg) t.emplace_back(id, itg.col(), -itg.value());
        t.emplace_back(id, wcol, -1.0);
        b[id] = rhs_r[i];
      } else {
        t.emplace_back(id, id, 1.0);
        b[id] = bound_of(sets.state[i]);
      }
      // w row
      t.emplace_back(wcol, id, p.mu * mass[i]);
      t.emplace_back(wcol, wcol, tau * mass[i]);
      for (std::size_t k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k) {
        t.emplace_back(wcol, static_cast<int>(nn) + K.cols[k], tau * p.beta * K.vals[k]);
      }
      b[wcol] = p.mu * mass[i] * u_prev_int[i];
    }
    SpMat A(N, N);
    A.setFromTriplets(t.begin(), t.end());
    Iterate it;
    const auto x = sparse_lu_solve(A, b, it.lin_residual);
    it.u_all.assign(x.begin(), x.begin() + nn);
    it.w.assign(x.begin() + nn, x.end());
    Eigen::Map<const Eigen::VectorXd> uvec(it.u_all.data(), nn);
    const Eigen::VectorXd conv = G * uvec;
    it.u_int.resize(n);
    it.lambda.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const int id = grid.interior_ids[i];
      if (sets.state[i] != 0) it.u_all[id] = bound_of(sets.state[i]);
      it.u_int[i] = it.u_all[id];
      const double g = it.w[i] + conv[id] + rhs_r[i];
      it.lambda[i] = g - xi_h[i] * it.u_int[i];
    }
    return it;
  };
  return run_pdas(n, config, diag_scale, std::move(init), solve);
}

PdasResult pdas_step_local_obstacle(const Grid& grid, const StiffnessMatrix& K,
                                    const ModelParams& p, double tau, double eps,
                                    std::span<const double> u_prev,
                                    std::span<const double> m_prev,
                                    const PdasConfig& config, const ActiveSets* warm_start) {
  check_inputs(grid, u_prev, m_prev, tau);
  if (grid.layer != 0) throw Error("local obstacle step expects a grid without interaction layer");
  const std::size_t n = grid.num_interior();
  const auto mass = grid.interior_mass();
  const auto u0 = grid.restrict_interior(u_prev);
  const double e2 = eps * eps;
  ActiveSets init = warm_start ? *warm_start : ActiveSets::from_bounds(u0);
  if (init.size() != n) throw Error("warm-start active sets do not match grid");
  double diag_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diag_scale = std::max(diag_scale, p.mu / tau - p.c_F + e2 * K.at(i, i) / mass[i]);
  }

  std::vector<double> forcing(n);  // M (c_F m - c_F/2)
  for (std::size_t i = 0; i < n; ++i) forcing[i] = mass[i] * (p.c_F * m_prev[i] - 0.5 * p.c_F);

  if (p.beta == 0.0) {
    const double shift = p.mu / tau - p.c_F;
    if (!(shift > 0.0)) {
      throw Error("local obstacle step requires mu/tau > c_F (reduce tau)");
    }
    std::vector<double> diag(n), b_full(n);
    for (std::size_t i = 0; i < n; ++i) {
      diag[i] = shift * mass[i];
      b_full[i] = p.mu / tau * mass[i] * u0[i] + forcing[i];
    }
    const CsrMatrix A = scaled_plus_diagonal(K, e2, diag);
    std::vector<double> x(u0);

    auto solve = [&](const ActiveSets& sets) {
      // Symmetric elimination of the active rows and columns.
      CsrMatrix R;
      R.n = n;
      R.row_ptr.push_back(0);
      std::vector<double> b(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (sets.state[i] != 0) {
          R.cols.push_back(static_cast<int>(i));
          R.vals.push_back(1.0);
          b[i] = bound_of(sets.state[i]);
        } else {
          double bi = b_full[i];
          for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const int j = A.cols[k];
            if (sets.state[j] != 0) {
              bi -= A.vals[k] * bound_of(sets.state[j]);
            } else {
              R.cols.push_back(j);
              R.vals.push_back(A.vals[k]);
            }
          }
          b[i] = bi;
        }
        R.row_ptr.push_back(R.cols.size());
      }
      CgOptions opts;
      opts.rel_tol = config.lin_tol;
      const auto stats = cg_solve(R, b, x, opts);
      if (!stats.converged) {
        throw Error("PDAS inner solver breakdown: CG stopped at relative residual " +
                    std::to_string(stats.residual) + " after " +
                    std::to_string(stats.iterations) + " iterations");
      }
      Iterate it;
      it.u_int = x;
      for (std::size_t i = 0; i < n; ++i) {
        if (sets.state[i] != 0) it.u_int[i] = bound_of(sets.state[i]);
      }
      const auto Au = A * std::span<const double>(it.u_int);
      it.lambda.resize(n);
      it.w.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        it.lambda[i] = (b_full[i] - Au[i]) / mass[i];
        it.w[i] = -p.mu / tau * (it.u_int[i] - u0[i]);
      }
      it.u_all.assign(u_prev.begin(), u_prev.end());
      grid.scatter_interior(it.u_int, it.u_all);
      it.lin_residual = stats.residual;
      return it;
    };
    return run_pdas(n, config, diag_scale, std::move(init), solve);
  }

  // beta > 0: unknowns [u, w], both interior.
  const int N = static_cast<int>(2 * n);
  auto solve = [&](const ActiveSets& sets) {
    std::vector<Triplet> t;
    t.reserve(4 * K.nnz() + 4 * n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
    for (std::size_t i = 0; i < n; ++i) {
      const int ui = static_cast<int>(i);
      const int wi = static_cast<int>(n + i);
      if (sets.state[i] == 0) {
        for (std::size_t k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k) {
          t.emplace_back(ui, K.cols[k], e2 * K.vals[k]);
        }
        t.emplace_back(ui, ui, -p.c_F * mass[i]);
        t.emplace_back(ui, wi, -mass[i]);
        b[ui] = forcing[i];
      } else {
        t.emplace_back(ui, ui, 1.0);
        b[ui] = bound_of(sets.state[i]);
      }
      t.emplace_back(wi, ui, p.mu * mass[i]);
      t.emplace_back(wi, wi, tau * mass[i]);
      for (std::size_t k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k) {
        t.emplace_back(wi, static_cast<int>(n) + K.cols[k], tau * p.beta * K.vals[k]);
      }
      b[wi] = p.mu * mass[i] * u0[i];
    }
    SpMat A(N, N);
    A.setFromTriplets(t.begin(), t.end());
    Iterate it;
    const auto x = sparse_lu_solve(A, b, it.lin_residual);
    it.u_int.assign(x.begin(), x.begin() + n);
    it.w.assign(x.begin() + n, x.end());
    for (std::size_t i = 0; i < n; ++i) {
      if (sets.state[i] != 0) it.u_int[i] = bound_of(sets.state[i]);
    }
    const auto Ku = K * std::span<const double>(it.u_int);
    it.lambda.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      it.lambda[i] = it.w[i] - e2 * Ku[i] / mass[i] + p.c_F * it.u_int[i] - 0.5 * p.c_F +
                     p.c_F * m_prev[i];
    }
    it.u_all.assign(u_prev.begin(), u_prev.end());
    grid.scatter_interior(it.u_int, it.u_all);
    return it;
  };
  return run_pdas(n, config, diag_scale, std::move(init), solve);
}

}  // namespace nlpf
