#include "tma/array.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "tma/datapath.hpp"

namespace tma {

namespace {

constexpr int kChainLen = simd::kCells;  // 12 cells end to end

int ceil_div(int a, int b) { return (a + b - 1) / b; }

int32_t narrow32(int64_t v) {
  if (v > std::numeric_limits<int32_t>::max() || v < std::numeric_limits<int32_t>::min())
    throw std::overflow_error("accumulated sum exceeds 32-bit psum storage");
  return int32_t(v);
}

}  // namespace

const char* case_name(ArrayCase c) {
  switch (c) {
    case ArrayCase::conv3: return "conv3";
    case ArrayCase::conv5: return "conv5";
    case ArrayCase::conv11: return "conv11";
    case ArrayCase::fc: return "fc";
  }
  return "?";
}

ArrayConfig configure(const LayerSpec& layer) {
  ArrayConfig c;
  c.mode = layer.precision;
  c.k_out = layer.k_out;
  c.c_in = layer.c_in;
  c.h_in = layer.h_in;
  c.w_in = layer.w_in;
  if (layer.k_out < 1 || layer.c_in < 1 || layer.h_in < 1 || layer.w_in < 1)
    throw std::invalid_argument("layer '" + layer.name + "': non-positive dimensions");

  if (layer.kind == LayerKind::fc) {
    c.kase = ArrayCase::fc;
    c.filters_per_pass = 1;
    c.depth_tile = 0;
    c.psums_per_step = 1;
    c.block_rows = 4;
    c.block_cols = 4;
    c.window = 12;
    c.row_group_h = 12;
    c.h_out = c.w_out = 1;
    c.w_span = 12;  // shifts per weight tile
    c.fill = 0;     // the 12 shifts of a tile are the fill
    c.fc_tiles = ceil_div(layer.flat_in(), simd::kLanes);
    c.filter_groups = layer.k_out;
    c.depth_tiles = 1;
    return c;
  }

  if (layer.s_h < 1 || layer.s_v < 1)
    throw std::invalid_argument("layer '" + layer.name + "': stride must be >= 1");
  if (layer.pad < 0) throw std::invalid_argument("layer '" + layer.name + "': negative padding");
  if (layer.k_h < 1 || layer.k_w < 1)
    throw std::invalid_argument("layer '" + layer.name + "': bad kernel");
  const int kmax = std::max(layer.k_h, layer.k_w);
  if (kmax > 11)
    throw std::invalid_argument("layer '" + layer.name + "': kernel " + std::to_string(kmax) +
                                " exceeds the supported maximum of 11");

  if (kmax <= 3) {
    c.kase = ArrayCase::conv3;
    c.filters_per_pass = 4;
    c.depth_tile = 64;
    c.psums_per_step = 4;
    c.block_rows = c.block_cols = 1;
    c.fill = 3;
  } else if (kmax <= 5) {
    c.kase = ArrayCase::conv5;
    c.filters_per_pass = 2;
    c.depth_tile = 32;
    c.psums_per_step = 2;
    c.block_rows = c.block_cols = 2;
    c.fill = 3;
  } else {
    c.kase = ArrayCase::conv11;
    c.filters_per_pass = 1;
    c.depth_tile = 16;
    c.psums_per_step = 1;
    c.block_rows = c.block_cols = 4;
    c.fill = 12;
  }
  c.window = 3 * c.block_cols;
  c.row_group_h = 3 * c.block_rows;

  c.k_h = layer.k_h;
  c.k_w = layer.k_w;
  c.s_h = layer.s_h;
  c.s_v = layer.s_v;
  c.pad = layer.pad;
  c.h_pad = layer.h_in + 2 * layer.pad;
  c.w_pad = layer.w_in + 2 * layer.pad;
  c.h_out = (c.h_pad - c.k_h) / c.s_v + 1;
  c.w_out = (c.w_pad - c.k_w) / c.s_h + 1;
  if (c.h_out < 1 || c.w_out < 1)
    throw std::invalid_argument("layer '" + layer.name + "': empty output");
  c.w_span = c.w_pad + (c.window - c.k_w);

  // Vertical reuse needs the evicted data back in the FIFOs before the next
  // sweep consumes it, which holds once a sweep is at least as long as the
  // chain. Narrower layers fall back to SRAM-fed rows.
  c.reuse = c.w_span >= kChainLen && c.s_v < c.row_group_h;

  c.depth_tiles = ceil_div(layer.c_in, c.depth_tile);
  c.filter_groups = ceil_div(layer.k_out, c.filters_per_pass);
  return c;
}

LaneCoord lane_mapping(const ArrayConfig& cfg, int row, int cell, int depth) {
  LaneCoord lc;
  if (cfg.kase == ArrayCase::fc) {
    // the value inserted on shift t ends the 12-shift fill at cell 11 - t
    lc.slot = 0;
    lc.ch = (kChainLen - 1 - cell) * simd::kRows * simd::kDepth + row * simd::kDepth + depth;
    lc.assigned = true;  // realness depends on the tile; load decides
    return lc;
  }
  const int col = cell / 3;
  lc.slot = cfg.kase == ArrayCase::conv3 ? col
            : cfg.kase == ArrayCase::conv5 ? col / 2
                                           : 0;
  const int q = cell - 3 * lc.slot * cfg.block_cols;   // window cell, 0 = newest
  const int pos_left = cfg.window - 1 - q;             // distance from window left edge
  const int jr = row % cfg.row_group_h;
  const int rg = row / cfg.row_group_h;
  if (pos_left < cfg.k_w) lc.kx = pos_left;
  if (jr < cfg.k_h) lc.ky = jr;
  lc.ch = 16 * rg + depth;
  lc.assigned = lc.kx >= 0 && lc.ky >= 0;
  return lc;
}

WeightPlan load_weights(const ArrayConfig& cfg, const PsiWeightTensor& weights, int group,
                        int tile) {
  if (cfg.kase == ArrayCase::fc)
    throw std::invalid_argument("load_weights: use load_weights_fc for FC configurations");
  if (weights.dims.size() != 4 || int(weights.dims[0]) != cfg.k_out ||
      int(weights.dims[1]) != cfg.k_h || int(weights.dims[2]) != cfg.k_w ||
      int(weights.dims[3]) != cfg.c_in)
    throw std::invalid_argument("load_weights: weight tensor shape mismatch");
  if (group < 0 || group >= cfg.filter_groups || tile < 0 || tile >= cfg.depth_tiles)
    throw std::out_of_range("load_weights: group/tile out of range");

  WeightPlan plan;
  plan.assigned.assign(simd::kLanes, 0);
  for (int s = 0; s < cfg.filters_per_pass; ++s) {
    const int f = group * cfg.filters_per_pass + s;
    plan.slot_filter[size_t(s)] = f < cfg.k_out ? f : -1;
  }

  const auto strides = [&](int f, int ky, int kx, int ch) {
    return ((size_t(f) * size_t(cfg.k_h) + size_t(ky)) * size_t(cfg.k_w) + size_t(kx)) *
               size_t(cfg.c_in) +
           size_t(ch);
  };

  for (int row = 0; row < simd::kRows; ++row)
    for (int cell = 0; cell < simd::kCells; ++cell)
      for (int d = 0; d < simd::kDepth; ++d) {
        const LaneCoord lc = lane_mapping(cfg, row, cell, d);
        const int f = plan.slot_filter[size_t(lc.slot)];
        const int ch = tile * cfg.depth_tile + lc.ch;
        if (!lc.assigned || f < 0 || ch >= cfg.c_in) continue;
        const PsiWeight& pw = weights.data[strides(f, lc.ky, lc.kx, ch)];
        const size_t i = simd::lane_index(row, cell, d);
        for (int k = 0; k < 2; ++k) {
          plan.pass[size_t(k)].s1[i] = pw.terms[size_t(2 * k)].s;
          plan.pass[size_t(k)].n1[i] = pw.terms[size_t(2 * k)].n;
          plan.pass[size_t(k)].s2[i] = pw.terms[size_t(2 * k + 1)].s;
          plan.pass[size_t(k)].n2[i] = pw.terms[size_t(2 * k + 1)].n;
        }
        plan.assigned[i] = 1;
        plan.active_lanes++;
      }
  return plan;
}

WeightPlan load_weights_fc(const ArrayConfig& cfg, const PsiWeightTensor& weights, int neuron,
                           int tile) {
  if (cfg.kase != ArrayCase::fc)
    throw std::invalid_argument("load_weights_fc: configuration is not FC");
  if (weights.dims.size() != 2 || int(weights.dims[0]) != cfg.k_out)
    throw std::invalid_argument("load_weights_fc: weight tensor shape mismatch");
  const int c_flat = int(weights.dims[1]);
  if (neuron < 0 || neuron >= cfg.k_out || tile < 0 || tile >= cfg.fc_tiles)
    throw std::out_of_range("load_weights_fc: neuron/tile out of range");

  WeightPlan plan;
  plan.assigned.assign(simd::kLanes, 0);
  plan.slot_filter[0] = neuron;

  for (int row = 0; row < simd::kRows; ++row)
    for (int cell = 0; cell < simd::kCells; ++cell)
      for (int d = 0; d < simd::kDepth; ++d) {
        const LaneCoord lc = lane_mapping(cfg, row, cell, d);
        const int g = tile * simd::kLanes + lc.ch;
        if (g >= c_flat) continue;
        const PsiWeight& pw = weights.data[size_t(neuron) * size_t(c_flat) + size_t(g)];
        const size_t i = simd::lane_index(row, cell, d);
        for (int k = 0; k < 2; ++k) {
          plan.pass[size_t(k)].s1[i] = pw.terms[size_t(2 * k)].s;
          plan.pass[size_t(k)].n1[i] = pw.terms[size_t(2 * k)].n;
          plan.pass[size_t(k)].s2[i] = pw.terms[size_t(2 * k + 1)].s;
          plan.pass[size_t(k)].n2[i] = pw.terms[size_t(2 * k + 1)].n;
        }
        plan.assigned[i] = 1;
        plan.active_lanes++;
      }
  return plan;
}

// --- ArraySim --------------------------------------------------------------

ArraySim::ArraySim(const ArrayConfig& cfg) : cfg_(cfg), pairs_(mode_info(cfg.mode).pairs) {
  plan_.assigned.assign(simd::kLanes, 0);
}

void ArraySim::set_weights(const WeightPlan& plan) { plan_ = plan; }

void ArraySim::begin_stream(int tile) {
  lanes_.x.fill(0);
  lanes_.negx.fill(0);
  for (auto& q : feedback_) q.clear();
  t_ = 0;
  shifts_ = 0;
  feedback_pushes_ = 0;
  tile_ = tile;
  demand_ready_ = false;
}

bool ArraySim::row_fresh(int sweep, int row) const {
  if (cfg_.kase == ArrayCase::fc) return true;
  if (sweep == 0 || !cfg_.reuse) return true;
  const int jr = row % cfg_.row_group_h;
  return jr >= cfg_.row_group_h - cfg_.s_v;
}

void ArraySim::resolve_sources() {
  demand_.clear();
  if (cfg_.kase == ArrayCase::fc) {
    const int64_t t = t_;
    for (int row = 0; row < simd::kRows; ++row) {
      const int64_t local = t * 192 + row * simd::kDepth;
      const int64_t global = int64_t(tile_) * simd::kLanes + local;
      const int n = int(std::clamp<int64_t>(cfg_.c_in - global, 0, simd::kDepth));
      src_[size_t(row)] = RowSrc{false, -1};
      if (n > 0) {
        src_[size_t(row)].fetch = int(demand_.size());
        demand_.push_back(Fetch{row, n, 0, 0, 0, global});
      }
    }
    demand_ready_ = true;
    return;
  }

  const int sweep = int(t_ / cfg_.w_span);
  const int x = int(t_ % cfg_.w_span);
  for (int row = 0; row < simd::kRows; ++row) {
    const int jr = row % cfg_.row_group_h;
    const int rg = row / cfg_.row_group_h;
    if (!row_fresh(sweep, row)) {
      src_[size_t(row)] = RowSrc{true, -1};
      continue;
    }
    src_[size_t(row)] = RowSrc{false, -1};
    const int v = sweep * cfg_.s_v + jr - cfg_.pad;
    const int xi = x - cfg_.pad;
    const int c0 = tile_ * cfg_.depth_tile + 16 * rg;
    const int n = std::clamp(cfg_.c_in - c0, 0, int(simd::kDepth));
    if (v >= 0 && v < cfg_.h_in && xi >= 0 && xi < cfg_.w_in && n > 0) {
      src_[size_t(row)].fetch = int(demand_.size());
      demand_.push_back(Fetch{row, n, v, xi, c0, 0});
    }
  }
  demand_ready_ = true;
}

const std::vector<ArraySim::Fetch>& ArraySim::demand() {
  if (!demand_ready_) resolve_sources();
  return demand_;
}

StepResult ArraySim::input_shift(std::span<const uint8_t> fetched) {
  if (!demand_ready_) resolve_sources();
  size_t want = 0;
  for (const Fetch& f : demand_) want += size_t(f.n);
  if (fetched.size() != want)
    throw std::invalid_argument("input_shift: expected " + std::to_string(want) +
                                " fetched values, got " + std::to_string(fetched.size()));
  StepResult r = do_shift(fetched, false);
  ++shifts_;
  return r;
}

StepResult ArraySim::flush_tail() {
  StepResult agg;
  if (cfg_.kase == ArrayCase::fc) return agg;
  const int tail = 3 * (cfg_.filters_per_pass - 1) * cfg_.block_cols;
  for (int i = 0; i < tail; ++i) {
    StepResult r = do_shift({}, true);
    agg.overflow18_events += r.overflow18_events;
    for (auto& o : r.outputs) agg.outputs.push_back(o);
  }
  return agg;
}

StepResult ArraySim::do_shift(std::span<const uint8_t> fetched, bool tail) {
  // evictions leave the chain end; rows whose data the next sweep reuses
  // feed the queue of the row s_v above within the same row group
  const int64_t evict_idx = t_ - kChainLen;
  if (evict_idx >= 0 && cfg_.kase != ArrayCase::fc && cfg_.reuse &&
      (evict_idx / cfg_.w_span) + 1 < cfg_.h_out) {
    for (int row = 0; row < simd::kRows; ++row) {
      const int jr = row % cfg_.row_group_h;
      if (jr < cfg_.s_v) continue;  // top rows of the window fall out of reuse
      std::array<uint8_t, 16> ev;
      for (int d = 0; d < simd::kDepth; ++d)
        ev[size_t(d)] = uint8_t(lanes_.x[simd::lane_index(row, kChainLen - 1, d)]);
      auto& q = feedback_[size_t(row - cfg_.s_v)];
      if (q.size() >= kFifoCapacity)
        throw std::overflow_error("FIFO overflow on row " + std::to_string(row - cfg_.s_v));
      q.push_back(ev);
      feedback_pushes_ += simd::kDepth;
    }
  }

  // gather the entering column
  std::array<uint8_t, simd::kRows * simd::kDepth> newcol{};
  if (!tail) {
    size_t off = 0;
    std::array<size_t, simd::kRows> fetch_off{};
    for (const Fetch& f : demand_) {
      fetch_off[size_t(f.row)] = off;
      off += size_t(f.n);
    }
    for (int row = 0; row < simd::kRows; ++row) {
      const RowSrc& s = src_[size_t(row)];
      uint8_t* dst = &newcol[size_t(row) * simd::kDepth];
      if (s.from_feedback) {
        auto& q = feedback_[size_t(row)];
        if (q.empty())
          throw std::underflow_error("FIFO underflow on row " + std::to_string(row));
        const auto& ev = q.front();
        std::memcpy(dst, ev.data(), simd::kDepth);
        q.pop_front();
      } else if (s.fetch >= 0) {
        const Fetch& f = demand_[size_t(s.fetch)];
        std::memcpy(dst, fetched.data() + fetch_off[size_t(row)], size_t(f.n));
      }
    }
  }

  // shift every row chain one cell and install the new column through GEN_NEG
  for (int row = 0; row < simd::kRows; ++row) {
    int32_t* xrow = &lanes_.x[simd::lane_index(row, 0, 0)];
    int32_t* grow = &lanes_.negx[simd::lane_index(row, 0, 0)];
    std::memmove(xrow + simd::kDepth, xrow, size_t(kChainLen - 1) * simd::kDepth * 4);
    std::memmove(grow + simd::kDepth, grow, size_t(kChainLen - 1) * simd::kDepth * 4);
    for (int d = 0; d < simd::kDepth; ++d) {
      const int32_t v = newcol[size_t(row) * simd::kDepth + size_t(d)];
      xrow[d] = v;
      grow[d] = -v;
    }
  }

  StepResult res;
  collect_outputs(res);
  ++t_;
  demand_ready_ = false;
  return res;
}

void ArraySim::collect_outputs(StepResult& res) {
  if (cfg_.kase == ArrayCase::fc) {
    if (t_ == 11 && plan_.slot_filter[0] >= 0) {
      int64_t v = eval_group(0, 0, 0, &res.overflow18_events);
      res.outputs.push_back(StepOutput{0, plan_.slot_filter[0], 0, 0, v});
    }
    return;
  }
  for (int slot = 0; slot < cfg_.filters_per_pass; ++slot) {
    if (plan_.slot_filter[size_t(slot)] < 0) continue;
    const int64_t lead = 3 * slot * cfg_.block_cols;
    const int64_t r = t_ - lead;
    if (r < cfg_.window - 1) continue;
    const int64_t sweep = r / cfg_.w_span;
    const int xr = int(r % cfg_.w_span);
    if (xr < cfg_.window - 1) continue;  // window straddles a sweep boundary
    const int x0 = xr - (cfg_.window - 1);
    if (x0 % cfg_.s_h != 0) continue;
    const int ox = x0 / cfg_.s_h;
    if (ox >= cfg_.w_out || sweep >= cfg_.h_out) continue;
    int64_t v = eval_group(slot, ox, int(sweep), &res.overflow18_events);
    res.outputs.push_back(StepOutput{slot, plan_.slot_filter[size_t(slot)], ox, int(sweep), v});
  }
}

int64_t ArraySim::eval_group(int slot, int x, int y, int64_t* overflow_events) {
  const auto& kern = simd::active_kernels();
  int64_t total = 0;
  alignas(32) int32_t pass_sums[64];
  std::array<int64_t, 64> ne_tot;
  auto width_check = [this](int64_t v) {
    if (!width_check_bits_) return;
    const int64_t lim = int64_t(1) << (width_check_bits_ - 1);
    if (v >= lim || v < -lim) ++width_flags_;
  };
  for (int bc = 0; bc < cfg_.block_cols; ++bc) {
    const int col = slot * cfg_.block_cols + bc;
    ne_tot.fill(0);
    for (int k = 0; k < pairs_; ++k) {
      kern.eval_column(lanes_, plan_.pass[size_t(k)], col, pass_sums);
      for (int i = 0; i < 64; ++i) {
        if (pass_sums[i] > kSigned18Max || pass_sums[i] < kSigned18Min) ++*overflow_events;
        ne_tot[size_t(i)] += pass_sums[i];
      }
    }
    for (int64_t v : ne_tot) width_check(v);
    int64_t ext = 0;
    if (bc == 0 && ext_source) ext = ext_source(slot, x, y);
    total += moa66(ne_tot, ext, 0);
  }
  width_check(total);
  return total;
}

// --- layer orchestration ----------------------------------------------------

namespace {

void deliver(MemSys& mem, TensorI32& psums, const ArrayConfig& cfg, bool final_tile,
             const StepOutput& o) {
  if (!final_tile) {
    mem.store_psum(o.filter, o.y, o.x, o.value);
    return;
  }
  mem.store_final(o.filter, o.y, o.x, o.value);
  if (cfg.kase == ArrayCase::fc)
    psums[size_t(o.filter)] = narrow32(o.value);
  else
    psums[psums.idx3(size_t(o.y), size_t(o.x), size_t(o.filter))] = narrow32(o.value);
}

}  // namespace

LayerRunResult run_layer(const LayerSpec& layer, const PsiWeightTensor& weights, MemSys& mem,
                         const LayerRegions& regs) {
  if (layer.kind == LayerKind::fc) return run_fc(layer, weights, mem, regs);

  const ArrayConfig cfg = configure(layer);
  LayerRunResult out;
  out.psums = TensorI32({uint32_t(cfg.h_out), uint32_t(cfg.w_out), uint32_t(cfg.k_out)});
  mem.begin_layer({regs.psum, regs.out, cfg.k_out, cfg.h_out, cfg.w_out, layer.post});

  ArraySim sim(cfg);
  std::vector<uint8_t> buf;
  CycleStats cyc;

  for (int g = 0; g < cfg.filter_groups; ++g) {
    for (int tile = 0; tile < cfg.depth_tiles; ++tile) {
      WeightPlan plan = load_weights(cfg, weights, g, tile);

      int real_f = 0;
      for (int s = 0; s < cfg.filters_per_pass; ++s)
        if (plan.slot_filter[size_t(s)] >= 0) ++real_f;
      const int real_c = std::min(cfg.depth_tile, cfg.c_in - tile * cfg.depth_tile);
      const uint64_t slice = uint64_t(real_f) * uint64_t(cfg.k_h) * uint64_t(cfg.k_w) *
                             uint64_t(real_c);
      mem.count_dram_in(slice);
      mem.count_write(regs.weights, slice, slice);
      mem.count_read(regs.weights, slice, slice);  // decomposition block re-read
      cyc.weight_load_events++;

      sim.set_weights(plan);
      sim.begin_stream(tile);
      const bool final_tile = tile == cfg.depth_tiles - 1;
      sim.ext_source = [&](int slot, int x, int y) -> int64_t {
        const int f = sim.weights().slot_filter[size_t(slot)];
        if (tile == 0) return mem.read_i32(regs.bias, size_t(f));
        return mem.load_psum(f, y, x);
      };

      for (int s = 0; s < cfg.h_out; ++s) {
        for (int xi = 0; xi < cfg.w_span; ++xi) {
          const auto& dem = sim.demand();
          buf.clear();
          for (const auto& f : dem) {
            const size_t off =
                (size_t(f.v) * size_t(cfg.w_in) + size_t(f.x)) * size_t(cfg.c_in) + size_t(f.c0);
            const size_t cur = buf.size();
            buf.resize(cur + size_t(f.n));
            mem.read_u8(regs.input, off, size_t(f.n), buf.data() + cur);
          }
          StepResult r = sim.input_shift(buf);
          out.overflow18_events += r.overflow18_events;
          for (const auto& o : r.outputs) deliver(mem, out.psums, cfg, final_tile, o);
        }
        cyc.fill_cycles += cfg.fill;
        if (cfg.mode == Precision::int8)
          cyc.psi_extra_cycles += (cfg.w_span + cfg.fill) / cfg.s_h;
      }
      StepResult r = sim.flush_tail();
      out.overflow18_events += r.overflow18_events;
      for (const auto& o : r.outputs) deliver(mem, out.psums, cfg, final_tile, o);

      cyc.shift_cycles += sim.shifts();
      mem.count_fifo_feedback(uint64_t(sim.feedback_pushes()));
    }
  }

  out.activations = mem.finish_layer();
  out.cycles = cyc;
  return out;
}

LayerRunResult run_fc(const LayerSpec& layer, const PsiWeightTensor& weights, MemSys& mem,
                      const LayerRegions& regs) {
  const ArrayConfig cfg = configure(layer);
  LayerRunResult out;
  out.psums = TensorI32({uint32_t(cfg.k_out)});
  mem.begin_layer({regs.psum, regs.out, cfg.k_out, 1, 1, layer.post});

  ArraySim sim(cfg);
  std::vector<uint8_t> buf;
  CycleStats cyc;
  const int c_flat = layer.flat_in();

  for (int o = 0; o < cfg.k_out; ++o) {
    for (int tile = 0; tile < cfg.fc_tiles; ++tile) {
      WeightPlan plan = load_weights_fc(cfg, weights, o, tile);
      const uint64_t slice =
          uint64_t(std::clamp(c_flat - tile * simd::kLanes, 0, int(simd::kLanes)));
      mem.count_dram_in(slice);
      mem.count_write(regs.weights, slice, slice);
      mem.count_read(regs.weights, slice, slice);
      cyc.weight_load_events++;

      sim.set_weights(plan);
      sim.begin_stream(tile);
      const bool final_tile = tile == cfg.fc_tiles - 1;
      sim.ext_source = [&](int, int, int) -> int64_t {
        if (tile == 0) return mem.read_i32(regs.bias, size_t(o));
        return mem.load_psum(o, 0, 0);
      };

      for (int t = 0; t < 12; ++t) {
        const auto& dem = sim.demand();
        buf.clear();
        for (const auto& f : dem) {
          const size_t cur = buf.size();
          buf.resize(cur + size_t(f.n));
          mem.read_u8(regs.input, size_t(f.flat), size_t(f.n), buf.data() + cur);
        }
        StepResult r = sim.input_shift(buf);
        out.overflow18_events += r.overflow18_events;
        for (const auto& so : r.outputs) deliver(mem, out.psums, cfg, final_tile, so);
      }
      cyc.shift_cycles += sim.shifts();
      if (cfg.mode == Precision::int8) cyc.psi_extra_cycles += 1;
    }
  }

  out.activations = mem.finish_layer();
  out.cycles = cyc;
  return out;
}

}  // namespace tma
