#pragma once

#include <cstddef>
#include <functional>
#include <string_view>

namespace nlpf::simd {

enum class Backend { Scalar, Avx2 };

/// Kernel table. Every backend computes the same quantities; vector
/// backends may differ from the scalar reference by rounding only.
struct Kernels {
  Backend backend;
  /// out[i] += sum_{t < taps} w[t] * src[i + t], for i in [0, n).
  void (*correlate_accumulate)(const double* src, const double* w, int taps,
                               double* out, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// y[i] = x[i] + b * y[i]
  void (*xpby)(const double* x, double b, double* y, std::size_t n);
};

const Kernels& scalar_kernels();
/// Null when the AVX2 translation unit was not compiled in.
const Kernels* avx2_kernels();

bool cpu_supports(Backend backend);

/// Active kernel table. Chosen once: AVX2+FMA when the CPU has it, unless
/// NLPF_SIMD=scalar is set in the environment.
const Kernels& active();

/// Overrides the active backend (tests, benchmarks). Throws when the
/// backend is unavailable on this CPU.
void set_backend(Backend backend);
Backend active_backend();

std::string_view to_string(Backend backend);

/// Worker threads used by data-parallel loops (default 1).
void set_num_threads(int n);
int num_threads();

/// Runs body(begin, end) over [0, n) split into contiguous chunks, one per
/// worker thread. Chunks are disjoint, so results are independent of the
/// thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace nlpf::simd
