#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

// Runtime-dispatched kernels for the hot inner loop of the array engine:
// evaluating one pass of one NE column (4 NE rows x 16 depths x 9 SAMs,
// two terms each) over the lane grid. A scalar reference kernel is always
// available; AVX2 (x86-64) and NEON (aarch64) variants are selected at
// runtime and must match the scalar kernel bit-for-bit.
namespace tma::simd {

inline constexpr int kRows = 12;    // FIFO rows (4 NE rows x 3 SAM rows)
inline constexpr int kCells = 12;   // horizontal cells (4 NE cols x 3 SAM cols)
inline constexpr int kDepth = 16;   // NE array depth
inline constexpr int kLanes = kRows * kCells * kDepth;  // 2304

inline constexpr size_t lane_index(int row, int cell, int depth) {
  return size_t((row * kCells + cell) * kDepth + depth);
}

// Activation planes. negx carries the GEN_NEG output alongside x so the
// select step never negates locally.
struct LanePlanes {
  alignas(32) std::array<int32_t, kLanes> x{};
  alignas(32) std::array<int32_t, kLanes> negx{};
};

// Per-pass stationary weight planes: sign and shift of both terms.
struct PassPlanes {
  alignas(32) std::array<int8_t, kLanes> s1{};
  alignas(32) std::array<uint8_t, kLanes> n1{};
  alignas(32) std::array<int8_t, kLanes> s2{};
  alignas(32) std::array<uint8_t, kLanes> n2{};
};

// out_ne[ne_row * 16 + depth] = sum over the NE's 9 SAMs of both terms
// s * (mux(s, x, negx) << n) for the given column. 64 results.
using eval_column_fn = void (*)(const LanePlanes&, const PassPlanes&, int col, int32_t* out_ne);

struct Kernels {
  eval_column_fn eval_column;
  const char* name;
};

const Kernels& scalar_kernels();
const Kernels& active_kernels();  // best variant for this CPU, or scalar if forced
void set_force_scalar(bool on);
bool scalar_forced();
const char* active_name();

}  // namespace tma::simd
