#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tma/layer.hpp"
#include "tma/memsys.hpp"
#include "tma/psi.hpp"
#include "tma/simd.hpp"
#include "tma/tensor.hpp"

// The 4x4x16 NE array: stationary decomposed weights with zero-padded
// window edges, FIFO-fed horizontal input shifting with vertical-reuse
// feedback, per-column MOA66 aggregation and top binary adders, under the
// three convolution configurations plus the FC mode.
namespace tma {

enum class ArrayCase : uint8_t { conv3, conv5, conv11, fc };

const char* case_name(ArrayCase c);

struct ArrayConfig {
  ArrayCase kase = ArrayCase::conv3;
  Precision mode = Precision::int5;

  int filters_per_pass = 0;  // filter groups resident at once
  int depth_tile = 0;        // input channels per pass (0 for FC)
  int psums_per_step = 0;
  int block_rows = 0, block_cols = 0;  // spatial NE block per filter group
  int window = 0;            // horizontal cells of one group window (3/6/12)
  int row_group_h = 0;       // FIFO rows per channel group (3/6/12)

  // layer geometry
  int k_h = 0, k_w = 0, s_h = 1, s_v = 1, pad = 0;
  int h_in = 0, w_in = 0, c_in = 0, k_out = 0;
  int h_pad = 0, w_pad = 0, h_out = 0, w_out = 0;
  int w_span = 0;            // inserts per sweep: w_pad + (window - k_w)
  int fill = 0;              // fill charge per sweep
  bool reuse = false;        // vertical feedback reuse active

  int depth_tiles = 0;
  int filter_groups = 0;
  int fc_tiles = 0;          // FC weight tiles per output
};

// Deterministic mapping of a layer onto the array. Throws on unsupported
// kernels (> 11) or invalid strides.
ArrayConfig configure(const LayerSpec& layer);

// Static assignment of one lane (FIFO row, horizontal cell, depth) for a
// given configuration: which group slot it serves and which kernel
// coordinate / channel it carries. Lanes on the zero-padded window edges or
// beyond the real channel count are not assigned.
struct LaneCoord {
  int slot = -1;       // filter slot within the pass, -1 outside any group
  int ky = -1, kx = -1;
  int ch = -1;         // channel offset within the depth tile
  bool assigned = false;
};
LaneCoord lane_mapping(const ArrayConfig& cfg, int row, int cell, int depth);

struct WeightPlan {
  std::array<simd::PassPlanes, 2> pass{};
  std::array<int, 4> slot_filter{-1, -1, -1, -1};  // global filter per slot
  std::vector<uint8_t> assigned;                    // per lane
  int active_lanes = 0;

  bool lane_assigned(int row, int cell, int d) const {
    return assigned[simd::lane_index(row, cell, d)] != 0;
  }
};

// Places one filter group / depth tile of decomposed conv weights.
// weights dims must be {K, k_h, k_w, C}.
WeightPlan load_weights(const ArrayConfig& cfg, const PsiWeightTensor& weights, int group,
                        int tile);

// Places one 2,304-element FC weight tile of one output neuron.
// weights dims must be {K, C_flat}.
WeightPlan load_weights_fc(const ArrayConfig& cfg, const PsiWeightTensor& weights, int neuron,
                           int tile);

struct StepOutput {
  int slot = 0;
  int filter = 0;  // global filter / neuron id
  int x = 0, y = 0;
  int64_t value = 0;  // MOA66 + top-adder result including the injected psum/bias
};

struct StepResult {
  std::vector<StepOutput> outputs;
  int64_t overflow18_events = 0;
};

// The streaming engine. One instance is single-owner mutable state; the
// per-column lane evaluation runs through the runtime-dispatched kernels.
class ArraySim {
 public:
  explicit ArraySim(const ArrayConfig& cfg);

  void set_weights(const WeightPlan& plan);
  const WeightPlan& weights() const { return plan_; }

  // Resets chains, FIFOs and the shift counter for one (group, tile)
  // stream. The tile index anchors channel / flat-element coordinates.
  void begin_stream(int tile = 0);

  // SRAM fetches needed for the upcoming shift. conv: (v, x) input
  // coordinates with a channel span; fc: flat element offsets.
  struct Fetch {
    int row = 0;
    int n = 0;       // real lane count (depths 0..n-1)
    int v = 0, x = 0, c0 = 0;
    int64_t flat = 0;
  };
  const std::vector<Fetch>& demand();

  // One SH_EN cycle: installs the fetched values (order matching demand()),
  // runs feedback routing, and returns any outputs completed by this step.
  StepResult input_shift(std::span<const uint8_t> fetched);

  // Resolves trailing windows of lagging columns at stream end. These
  // shifts are overlapped with the next configuration and not counted.
  StepResult flush_tail();

  // Supplies the MOA66 psum/bias operand for an emitted output.
  std::function<int64_t(int slot, int x, int y)> ext_source;

  // Accumulator width check: sums are exact wide integers at model level;
  // with a nonzero bit budget, any NE total or emitted value outside the
  // signed budget is flagged (never wrapped).
  void set_width_check_bits(int bits) { width_check_bits_ = bits; }
  int64_t width_flags() const { return width_flags_; }

  int64_t shifts() const { return shifts_; }
  int64_t feedback_pushes() const { return feedback_pushes_; }
  bool row_fresh(int sweep, int row) const;  // source plan (true = SRAM/zero)
  size_t fifo_depth(int row) const { return feedback_[size_t(row)].size(); }
  int32_t lane_x(int row, int cell, int d) const {
    return lanes_.x[simd::lane_index(row, cell, d)];
  }

 private:
  void resolve_sources();
  StepResult do_shift(std::span<const uint8_t> fetched, bool tail);
  void collect_outputs(StepResult& res);
  int64_t eval_group(int slot, int x, int y, int64_t* overflow_events);

  ArrayConfig cfg_;
  int pairs_ = 1;
  int tile_ = 0;
  int width_check_bits_ = 0;
  int64_t width_flags_ = 0;
  WeightPlan plan_;
  simd::LanePlanes lanes_;
  std::array<std::deque<std::array<uint8_t, 16>>, simd::kRows> feedback_;
  int64_t t_ = 0;        // next insert index
  int64_t shifts_ = 0;
  int64_t feedback_pushes_ = 0;
  bool demand_ready_ = false;
  std::vector<Fetch> demand_;
  struct RowSrc {
    bool from_feedback = false;
    int fetch = -1;  // index into demand_, -1 when the row is all zero
  };
  std::array<RowSrc, simd::kRows> src_{};
};

// --- layer orchestration -------------------------------------------------

struct LayerRegions {
  std::string input;
  std::string weights;
  std::string bias;
  std::string psum;
  std::string out;
};

struct LayerRunResult {
  TensorI32 psums;       // final accumulated sums: {h_out, w_out, K} or {K}
  TensorU8 activations;  // after post-ops (and pooling)
  CycleStats cycles;
  int64_t overflow18_events = 0;
};

// Runs one layer through the array. The input feature map and the bias
// values must already be resident in their regions; weights arrive
// decomposed (the staging traffic is counted per tile load).
LayerRunResult run_layer(const LayerSpec& layer, const PsiWeightTensor& weights, MemSys& mem,
                         const LayerRegions& regs);

LayerRunResult run_fc(const LayerSpec& layer, const PsiWeightTensor& weights, MemSys& mem,
                      const LayerRegions& regs);

}  // namespace tma
