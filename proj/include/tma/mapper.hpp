#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tma/array.hpp"
#include "tma/layer.hpp"

// Closed-form models of the array's execution: cycles and Psum traffic per
// layer. The simulator and these models are mutual oracles — on any layer
// actually run through the array they must agree exactly.
namespace tma {

inline constexpr int kPeakMacs = 2304;  // parallel MAC lanes of the 4x4x16 array

struct ExecutionPlan {
  LayerSpec layer;
  ArrayConfig config;
  int depth_tiles = 0;
  int filter_groups = 0;
  int fc_tiles = 0;
  int sweeps = 0;  // horizontal sweeps per (group, tile)
};

ExecutionPlan plan_layer(const LayerSpec& layer);
std::vector<ExecutionPlan> plan_network(const NetworkSpec& net);

// Conv: per sweep, w_span insert shifts plus the fill charge; in INT8 mode
// one extra PSI-accumulation cycle every s_h shifts. FC: 12 shifts per
// weight tile plus one INT8 accumulation cycle.
CycleStats cycle_model(const ExecutionPlan& plan);

struct PsumTraffic {
  uint64_t stores = 0;  // every delivered output: depth_tiles (fc_tiles) per element
  uint64_t loads = 0;   // reloads: tiles - 1 per element
};

PsumTraffic psum_traffic_model(const ExecutionPlan& plan);

// Peak MACs per second at the given clock; INT8 halves it (two PSI passes
// per MAC).
double peak_gmacs(double freq_mhz, Precision mode);

struct LayerModelRow {
  std::string name;
  ArrayCase kase;
  Precision precision;
  CycleStats cycles;
  int64_t macs = 0;
  double effective_gmacs = 0;
  PsumTraffic traffic;
};

struct ModelReport {
  std::vector<LayerModelRow> rows;
  int64_t total_cycles = 0;
  int64_t total_macs = 0;
  double frames_per_s = 0;
  double freq_mhz = 0;
};

ModelReport throughput_report(const std::vector<ExecutionPlan>& plans, double freq_mhz);

}  // namespace tma
