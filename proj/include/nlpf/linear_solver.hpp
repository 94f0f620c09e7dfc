#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nlpf {

/// Compressed sparse row matrix, square.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;  // size n + 1
  std::vector<int> cols;
  std::vector<double> vals;

  std::size_t nnz() const noexcept { return vals.size(); }
  double at(std::size_t row, std::size_t col) const;
  std::vector<double> diagonal() const;

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;
};

/// a * A + diag(d), sharing the sparsity pattern of A (A must store its
/// diagonal explicitly).
CsrMatrix scaled_plus_diagonal(const CsrMatrix& A, double a,
                               std::span<const double> d);

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;  // ||b - A x|| / (||b|| + ||A||_inf ||x||)
  bool converged = false;
  bool used_direct = false;
};

struct CgOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-300;
  int max_iters = 0;  // 0 => 10 * n + 100
  std::size_t dense_fallback_limit = 500;
};

/// Jacobi-preconditioned conjugate gradient for SPD matrices. `x` carries
/// the initial guess in and the solution out. Falls back to a dense
/// Cholesky/LU solve when CG stalls and n is at most the fallback limit.
SolveStats cg_solve(const CsrMatrix& A, std::span<const double> b,
                    std::span<double> x, const CgOptions& options = {});

/// Dense direct solve (LU with partial pivoting), used for small systems
/// and as fallback.
std::vector<double> dense_solve(const CsrMatrix& A, std::span<const double> b);

}  // namespace nlpf
