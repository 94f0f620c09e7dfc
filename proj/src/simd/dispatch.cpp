#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "nlpf/error.hpp"
#include "nlpf/simd.hpp"

namespace nlpf::simd {
namespace {

const Kernels* pick_default() {
  const char* env = std::getenv("NLPF_SIMD");
  if (env != nullptr && std::string(env) == "scalar") return &scalar_kernels();
  if (cpu_supports(Backend::Avx2)) return avx2_kernels();
  return &scalar_kernels();
}

std::atomic<const Kernels*>& active_slot() {
  static std::atomic<const Kernels*> slot{pick_default()};
  return slot;
}

std::atomic<int> g_threads{1};

}  // namespace

bool cpu_supports(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(__x86_64__) || defined(__i386__)
      return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2") &&
             __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const Kernels& active() { return *active_slot().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (!cpu_supports(backend)) {
    throw Error("SIMD backend " + std::string(to_string(backend)) +
                " is not available on this CPU");
  }
  active_slot().store(backend == Backend::Scalar ? &scalar_kernels() : avx2_kernels());
}

Backend active_backend() { return active().backend; }

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "unknown";
}

void set_num_threads(int n) { g_threads.store(std::max(1, n)); }
int num_threads() { return g_threads.load(); }

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(num_threads()), n);
  if (workers <= 1) {
    if (n > 0) body(0, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  body(0, std::min(n, chunk));
}

}  // namespace nlpf::simd
