#include "tma/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace tma::simd {

const Kernels* avx2_kernels_if_supported();
const Kernels* neon_kernels_if_supported();

namespace {

std::atomic<bool> g_force_scalar{false};

bool env_forced() {
  static const bool forced = [] {
    const char* env = std::getenv("TMA_SIMD");
    return env && std::strcmp(env, "scalar") == 0;
  }();
  return forced;
}

const Kernels* best_kernels() {
  static const Kernels* best = [] {
    if (const Kernels* k = avx2_kernels_if_supported()) return k;
    if (const Kernels* k = neon_kernels_if_supported()) return k;
    return &scalar_kernels();
  }();
  return best;
}

}  // namespace

const Kernels& active_kernels() {
  if (env_forced() || g_force_scalar.load(std::memory_order_relaxed)) return scalar_kernels();
  return *best_kernels();
}

void set_force_scalar(bool on) { g_force_scalar.store(on); }
bool scalar_forced() { return g_force_scalar.load(); }
const char* active_name() { return active_kernels().name; }

}  // namespace tma::simd
