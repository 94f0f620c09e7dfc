#include "nlpf/simd.hpp"

namespace nlpf::simd {
namespace {

void correlate_accumulate(const double* src, const double* w, int taps,
                          double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = out[i];
    for (int t = 0; t < taps; ++t) acc += w[t] * src[i + t];
    out[i] = acc;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpby(const double* x, double b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

constexpr Kernels kScalar{Backend::Scalar, correlate_accumulate, dot, axpy, xpby};

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

}  // namespace nlpf::simd
