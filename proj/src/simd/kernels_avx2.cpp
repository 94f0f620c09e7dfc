#include "nlpf/simd.hpp"

#if defined(NLPF_HAVE_AVX2_TU)
#include <immintrin.h>

namespace nlpf::simd {
namespace {

// Sixteen outputs per pass keep four independent FMA chains in flight.
void correlate_accumulate(const double* src, const double* w, int taps,
                          double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    __m256d a0 = _mm256_loadu_pd(out + i);
    __m256d a1 = _mm256_loadu_pd(out + i + 4);
    __m256d a2 = _mm256_loadu_pd(out + i + 8);
    __m256d a3 = _mm256_loadu_pd(out + i + 12);
    const double* s = src + i;
    for (int t = 0; t < taps; ++t) {
      const __m256d wt = _mm256_broadcast_sd(w + t);
      a0 = _mm256_fmadd_pd(wt, _mm256_loadu_pd(s + t), a0);
      a1 = _mm256_fmadd_pd(wt, _mm256_loadu_pd(s + t + 4), a1);
      a2 = _mm256_fmadd_pd(wt, _mm256_loadu_pd(s + t + 8), a2);
      a3 = _mm256_fmadd_pd(wt, _mm256_loadu_pd(s + t + 12), a3);
    }
    _mm256_storeu_pd(out + i, a0);
    _mm256_storeu_pd(out + i + 4, a1);
    _mm256_storeu_pd(out + i + 8, a2);
    _mm256_storeu_pd(out + i + 12, a3);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d a0 = _mm256_loadu_pd(out + i);
    for (int t = 0; t < taps; ++t) {
      a0 = _mm256_fmadd_pd(_mm256_broadcast_sd(w + t), _mm256_loadu_pd(src + i + t), a0);
    }
    _mm256_storeu_pd(out + i, a0);
  }
  for (; i < n; ++i) {
    double acc = out[i];
    for (int t = 0; t < taps; ++t) acc = __builtin_fma(w[t], src[i + t], acc);
    out[i] = acc;
  }
}

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void xpby(const double* x, double b, double* y, std::size_t n) {
  const __m256d bv = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(bv, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) y[i] = x[i] + b * y[i];
}

constexpr Kernels kAvx2{Backend::Avx2, correlate_accumulate, dot, axpy, xpby};

}  // namespace

const Kernels* avx2_kernels() { return &kAvx2; }

}  // namespace nlpf::simd

#else

namespace nlpf::simd {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace nlpf::simd

#endif
