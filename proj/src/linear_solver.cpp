#include "nlpf/linear_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "nlpf/error.hpp"
#include "nlpf/simd.hpp"

namespace nlpf {

double CsrMatrix::at(std::size_t row, std::size_t col) const {
  for (std::size_t k = row_ptr[row]; k < row_ptr[row + 1]; ++k) {
    if (static_cast<std::size_t>(cols[k]) == col) return vals[k];
  }
  return 0.0;
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = at(i, i);
  return d;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k] * x[cols[k]];
    y[i] = s;
  }
}

std::vector<double> CsrMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(n);
  multiply(x, y);
  return y;
}

CsrMatrix scaled_plus_diagonal(const CsrMatrix& A, double a,
                               std::span<const double> d) {
  CsrMatrix B = A;
  for (std::size_t i = 0; i < B.n; ++i) {
    bool found = false;
    for (std::size_t k = B.row_ptr[i]; k < B.row_ptr[i + 1]; ++k) {
      B.vals[k] *= a;
      if (static_cast<std::size_t>(B.cols[k]) == i) {
        B.vals[k] += d[i];
        found = true;
      }
    }
    if (!found) throw Error("scaled_plus_diagonal: missing diagonal entry");
  }
  return B;
}

std::vector<double> dense_solve(const CsrMatrix& A, std::span<const double> b) {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(A.n, A.n);
  for (std::size_t i = 0; i < A.n; ++i) {
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) dense(i, A.cols[k]) = A.vals[k];
  }
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), b.size());
  Eigen::VectorXd x = dense.partialPivLu().solve(rhs);
  if (!x.allFinite()) throw Error("dense solve produced non-finite values");
  return {x.data(), x.data() + x.size()};
}

SolveStats cg_solve(const CsrMatrix& A, std::span<const double> b,
                    std::span<double> x, const CgOptions& options) {
  const auto& k = simd::active();
  const std::size_t n = A.n;
  SolveStats stats;
  const double bnorm = std::sqrt(k.dot(b.data(), b.data(), n));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    stats.converged = true;
    return stats;
  }
  const int max_iters = options.max_iters > 0 ? options.max_iters
                                              : static_cast<int>(10 * n + 100);

  // Normwise backward error: ||r|| <= tol (||b|| + ||A|| ||x||), with the
  // infinity norm of A. A residual relative to ||b|| alone is out of reach
  // of rounding when b is small next to A x.
  double anorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) row += std::abs(A.vals[p]);
    anorm = std::max(anorm, row);
  }
  auto scale = [&] { return bnorm + anorm * std::sqrt(k.dot(x.data(), x.data(), n)); };
  auto target = [&] { return std::max(options.rel_tol * scale(), options.abs_tol); };

  std::vector<double> inv_diag = A.diagonal();
  for (double& v : inv_diag) {
    if (!(v > 0.0)) throw Error("cg_solve: matrix has a non-positive diagonal");
    v = 1.0 / v;
  }

  std::vector<double> r(n), z(n), p(n), q(n);
  auto true_residual = [&] {
    A.multiply(x, r);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = b[i] - r[i];
      s += r[i] * r[i];
    }
    return std::sqrt(s);
  };

  // Restart from the true residual when the recursive one has drifted
  // below the target while the true one has not.
  double rnorm = true_residual();
  double tgt = target();
  int it = 0;
  for (int restart = 0; restart < 4 && rnorm > tgt && it < max_iters; ++restart) {
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = k.dot(r.data(), z.data(), n);
    while (rnorm > tgt && it < max_iters) {
      A.multiply(p, q);
      const double pq = k.dot(p.data(), q.data(), n);
      if (!(pq > 0.0)) break;
      const double alpha = rz / pq;
      k.axpy(alpha, p.data(), x.data(), n);
      k.axpy(-alpha, q.data(), r.data(), n);
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
      const double rz_new = k.dot(r.data(), z.data(), n);
      k.xpby(z.data(), rz_new / rz, p.data(), n);
      rz = rz_new;
      rnorm = std::sqrt(k.dot(r.data(), r.data(), n));
      ++it;
      if (it % 32 == 0) tgt = target();
    }
    rnorm = true_residual();
    tgt = target();
  }
  stats.iterations = it;
  stats.residual = rnorm / scale();
  stats.converged = rnorm <= tgt;

  if (!stats.converged && n <= options.dense_fallback_limit) {
    const auto direct = dense_solve(A, b);
    std::copy(direct.begin(), direct.end(), x.begin());
    stats.residual = true_residual() / scale();
    stats.converged = true;
    stats.used_direct = true;
  }
  return stats;
}

}  // namespace nlpf
