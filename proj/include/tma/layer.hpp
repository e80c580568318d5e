#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tma/psi.hpp"

namespace tma {

enum class LayerKind : uint8_t { conv, fc };

// Post-accumulation processing: ReLU with an arithmetic-right-shift
// requantization clamp to [0, 255], then optional max pooling.
struct PostOps {
  int requant_shift = 0;
  int pool_k = 0;  // 0 = no pooling
  int pool_s = 0;
};

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::conv;
  // input shape: conv {h_in, w_in, c_in}; fc treats c_in as the flattened
  // length with h_in = w_in = 1
  int h_in = 0, w_in = 0, c_in = 0;
  int k_out = 0;            // filters / output neurons
  int k_h = 0, k_w = 0;     // kernel (conv only)
  int s_h = 1, s_v = 1;     // horizontal / vertical stride
  int pad = 0;              // symmetric zero padding
  Precision precision = Precision::int5;
  PostOps post;

  int h_out() const { return kind == LayerKind::fc ? 1 : (h_in + 2 * pad - k_h) / s_v + 1; }
  int w_out() const { return kind == LayerKind::fc ? 1 : (w_in + 2 * pad - k_w) / s_h + 1; }
  int flat_in() const { return h_in * w_in * c_in; }
  // output shape after post-ops
  int h_final() const { return post.pool_k ? (h_out() - post.pool_k) / post.pool_s + 1 : h_out(); }
  int w_final() const { return post.pool_k ? (w_out() - post.pool_k) / post.pool_s + 1 : w_out(); }
  int64_t macs() const {
    if (kind == LayerKind::fc) return int64_t(k_out) * flat_in();
    return int64_t(h_out()) * w_out() * k_out * k_h * k_w * c_in;
  }
};

struct NetworkSpec {
  std::string name;
  int h = 0, w = 0, c = 0;  // input feature map
  std::vector<LayerSpec> layers;
};

// Per-layer cycle accounting. The total is always the sum of the parts;
// weight-load events are charged at a configurable cost (default 0,
// i.e. loads overlap compute).
struct CycleStats {
  int64_t shift_cycles = 0;
  int64_t fill_cycles = 0;
  int64_t psi_extra_cycles = 0;
  int64_t weight_load_events = 0;
  int64_t weight_load_cost = 0;  // cycles charged per load event

  int64_t total() const {
    return shift_cycles + fill_cycles + psi_extra_cycles + weight_load_events * weight_load_cost;
  }
  bool operator==(const CycleStats&) const = default;
};

}  // namespace tma
