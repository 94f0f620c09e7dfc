#include <cmath>
#include <random>

#include "doctest.h"
#include "nlpf/simd.hpp"
#include "nlpf/verify.hpp"

using namespace nlpf;

TEST_SUITE("simd") {
  TEST_CASE("AVX2 kernels match the scalar reference") {
    const auto* avx = simd::avx2_kernels();
    if (!avx || !simd::cpu_supports(simd::Backend::Avx2)) {
      MESSAGE("AVX2 not available; skipped");
      return;
    }
    const auto& ref = simd::scalar_kernels();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1001u}) {
      for (int taps : {1, 2, 5, 17}) {
        std::vector<double> src(n + taps), w(taps), a(n, 0.5), b(n, 0.5);
        for (auto& v : src) v = U(rng);
        for (auto& v : w) v = U(rng);
        ref.correlate_accumulate(src.data(), w.data(), taps, a.data(), n);
        avx->correlate_accumulate(src.data(), w.data(), taps, b.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-14 * taps);
      }
      std::vector<double> x(n), y1(n), y2(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = U(rng), y1[i] = y2[i] = U(rng);
      CHECK(std::abs(ref.dot(x.data(), y1.data(), n) - avx->dot(x.data(), y1.data(), n)) <=
            1e-13 * (1.0 + static_cast<double>(n)));
      ref.axpy(0.3, x.data(), y1.data(), n);
      avx->axpy(0.3, x.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15);
      ref.xpby(x.data(), -0.7, y1.data(), n);
      avx->xpby(x.data(), -0.7, y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15);
    }
  }

  TEST_CASE("vector backend convolution equals the scalar one") {
    const auto c = verify::simd_equivalence();
    CHECK(c.pass);
  }

  TEST_CASE("backend selection") {
    const auto before = simd::active_backend();
    simd::set_backend(simd::Backend::Scalar);
    CHECK(simd::active_backend() == simd::Backend::Scalar);
    CHECK(simd::active().backend == simd::Backend::Scalar);
    simd::set_backend(before);
    CHECK(simd::to_string(simd::Backend::Avx2) == "avx2");
  }
}
