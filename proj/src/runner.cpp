#include "tma/runner.hpp"

#include <algorithm>
#include <random>

#include "tma/array.hpp"
#include "tma/golden.hpp"
#include "tma/mapper.hpp"
#include "tma/memsys.hpp"
#include "tma/simd.hpp"

namespace tma {

namespace {

uint64_t mix(uint64_t seed, uint64_t salt) {
  uint64_t x = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

std::string precision_str(const NetworkSpec& net) {
  bool any5 = false, any8 = false;
  for (const auto& l : net.layers) (l.precision == Precision::int5 ? any5 : any8) = true;
  if (any5 && any8) return "mixed";
  return any8 ? "int8" : "int5";
}

std::map<std::string, RegionStats> region_delta(const AccessCounters& after,
                                                const AccessCounters& before) {
  std::map<std::string, RegionStats> d;
  for (const auto& [name, st] : after.regions) {
    RegionStats prev;
    if (auto it = before.regions.find(name); it != before.regions.end()) prev = it->second;
    RegionStats diff{st.reads - prev.reads, st.writes - prev.writes,
                     st.read_bytes - prev.read_bytes, st.write_bytes - prev.write_bytes};
    if (diff.reads || diff.writes || diff.read_bytes || diff.write_bytes) d[name] = diff;
  }
  return d;
}

size_t weight_slice_bound(const ExecutionPlan& p) {
  if (p.layer.kind == LayerKind::fc) return simd::kLanes;
  const ArrayConfig& c = p.config;
  return size_t(c.filters_per_pass) * size_t(c.k_h) * size_t(c.k_w) * size_t(c.depth_tile);
}

}  // namespace

TensorU8 random_input(int h, int w, int c, uint64_t seed) {
  TensorU8 t({uint32_t(h), uint32_t(w), uint32_t(c)});
  std::mt19937_64 gen(mix(seed, 0x1a9));
  for (auto& v : t.data) v = uint8_t(gen() % 256);
  return t;
}

TensorI32 random_weights(const LayerSpec& l, uint64_t seed) {
  const ModeInfo mi = mode_info(l.precision);
  TensorI32 t;
  if (l.kind == LayerKind::fc)
    t = TensorI32({uint32_t(l.k_out), uint32_t(l.flat_in())});
  else
    t = TensorI32({uint32_t(l.k_out), uint32_t(l.k_h), uint32_t(l.k_w), uint32_t(l.c_in)});
  std::mt19937_64 gen(mix(seed, 0x2b7));
  const uint64_t range = uint64_t(mi.w_max - mi.w_min + 1);
  for (auto& v : t.data) v = int32_t(mi.w_min + int64_t(gen() % range));
  return t;
}

TensorI32 random_bias(int k, uint64_t seed) {
  TensorI32 t({uint32_t(k)});
  std::mt19937_64 gen(mix(seed, 0x3c5));
  for (auto& v : t.data) v = int32_t(int64_t(gen() % 2001) - 1000);
  return t;
}

RunReport run(const NetworkSpec& net, const RunOptions& opt) {
  if (opt.mode != "stats" && opt.mode != "functional" && opt.mode != "both")
    throw std::invalid_argument("mode must be stats, functional or both");

  NetworkSpec spec = net;
  if (opt.precision)
    for (auto& l : spec.layers) l.precision = *opt.precision;

  RunReport rep;
  rep.network = spec.name;
  rep.mode = opt.mode;
  rep.precision = precision_str(spec);
  rep.freq_mhz = opt.freq_mhz;
  rep.seed = opt.seed;
  rep.simd = simd::active_name();
  rep.peak_gmacs_int5 = peak_gmacs(opt.freq_mhz, Precision::int5);
  rep.peak_gmacs_int8 = peak_gmacs(opt.freq_mhz, Precision::int8);

  const auto plans = plan_network(spec);
  const ModelReport model = throughput_report(plans, opt.freq_mhz);

  if (opt.mode == "stats") {
    for (size_t i = 0; i < plans.size(); ++i) {
      const LayerModelRow& m = model.rows[i];
      LayerReportRow row;
      row.name = m.name;
      row.kase = case_name(m.kase);
      row.precision = mode_name(m.precision);
      row.cycles = m.cycles;
      row.macs = m.macs;
      row.effective_gmacs = m.effective_gmacs;
      row.psum_stores = m.traffic.stores;
      row.psum_loads = m.traffic.loads;
      rep.rows.push_back(row);
      rep.total_psum_stores += m.traffic.stores;
      rep.total_psum_loads += m.traffic.loads;
    }
    rep.total_cycles = model.total_cycles;
    rep.total_macs = model.total_macs;
    rep.frames_per_s = model.frames_per_s;
    return rep;
  }

  // --- simulated run ---
  MemSys mem;
  mem.define_region("Inputs", size_t(spec.h) * spec.w * spec.c);
  size_t wmax = 1, bmax = 4;
  for (const auto& p : plans) {
    wmax = std::max(wmax, weight_slice_bound(p));
    bmax = std::max(bmax, size_t(p.layer.k_out) * 4);
  }
  mem.define_region("Weights", wmax);
  mem.define_region("Bias", bmax);
  for (size_t i = 0; i < plans.size(); ++i) {
    const LayerSpec& l = plans[i].layer;
    const std::string n = std::to_string(i + 1);
    mem.define_region("PsumOfLayer" + n, size_t(l.h_out()) * l.w_out() * l.k_out * 4);
    mem.define_region("Layer" + n,
                      l.kind == LayerKind::fc
                          ? size_t(l.k_out)
                          : size_t(l.h_final()) * size_t(l.w_final()) * size_t(l.k_out));
  }

  TensorU8 cur;
  if (!opt.input_tmat.empty()) {
    AnyTensor t = read_tmat(opt.input_tmat);
    if (t.dtype != Dtype::u8 ||
        t.u8.dims != std::vector<uint32_t>{uint32_t(spec.h), uint32_t(spec.w), uint32_t(spec.c)})
      throw std::invalid_argument("input tensor must be u8 {" + std::to_string(spec.h) + "," +
                                  std::to_string(spec.w) + "," + std::to_string(spec.c) + "}");
    cur = t.u8;
  } else {
    cur = random_input(spec.h, spec.w, spec.c, opt.seed);
  }
  mem.load_from_dram_u8("Inputs", 0, cur.data);
  std::string cur_region = "Inputs";

  for (size_t i = 0; i < plans.size(); ++i) {
    const ExecutionPlan& plan = plans[i];
    const LayerSpec& l = plan.layer;
    const uint64_t lseed = mix(opt.seed, i);

    TensorI32 w = random_weights(l, lseed);
    TensorI32 bias = random_bias(l.k_out, lseed);
    TensorDecomposition dec = decompose_tensor(w.data, w.dims, l.precision);
    mem.load_from_dram_i32("Bias", 0, bias.data);

    LayerRegions regs{cur_region, "Weights", "Bias", "PsumOfLayer" + std::to_string(i + 1),
                      "Layer" + std::to_string(i + 1)};

    const AccessCounters before = mem.counters();
    LayerRunResult res;
    try {
      res = run_layer(l, dec.weights, mem, regs);
    } catch (const std::exception& e) {
      throw std::runtime_error("layer '" + l.name + "': " + e.what());
    }
    const AccessCounters after = mem.counters();

    // golden verification, zero tolerance
    TensorI32 ref;
    if (l.kind == LayerKind::fc) {
      TensorU8 flat;
      flat.dims = {uint32_t(l.flat_in())};
      flat.data = cur.data;
      ref = golden::quantized_fc_ref(flat, dec.weights, bias);
    } else {
      ref = golden::quantized_ref(cur, dec.weights, bias, l.s_h, l.s_v, l.pad);
    }
    const bool exact = res.psums == ref;

    // the analytic models and the measured run are mutual oracles
    const CycleStats modeled = cycle_model(plan);
    CycleStats measured = res.cycles;
    measured.weight_load_cost = modeled.weight_load_cost;
    const PsumTraffic traffic = psum_traffic_model(plan);
    const uint64_t st = after.psum_stores - before.psum_stores;
    const uint64_t ld = after.psum_loads - before.psum_loads;

    LayerReportRow row;
    row.name = l.name;
    row.kase = case_name(plan.config.kase);
    row.precision = mode_name(l.precision);
    row.cycles = measured;
    row.macs = l.macs();
    row.effective_gmacs = measured.total() > 0
                              ? double(row.macs) / double(measured.total()) * opt.freq_mhz / 1000.0
                              : 0.0;
    row.psum_stores = st;
    row.psum_loads = ld;
    row.simulated = true;
    row.bit_exact = exact;
    row.overflow18_events = res.overflow18_events;
    row.sram = region_delta(after, before);
    rep.rows.push_back(row);
    rep.total_cycles += measured.total();
    rep.total_macs += row.macs;
    rep.total_psum_stores += st;
    rep.total_psum_loads += ld;

    if (!exact)
      throw VerificationError("layer '" + l.name + "': simulated output differs from the golden "
                              "reference");
    if (!(measured == modeled))
      throw VerificationError("layer '" + l.name + "': measured cycles diverge from the cycle "
                              "model");
    if (st != traffic.stores || ld != traffic.loads)
      throw VerificationError("layer '" + l.name + "': psum counters diverge from the traffic "
                              "model (stores " + std::to_string(st) + " vs " +
                              std::to_string(traffic.stores) + ", loads " + std::to_string(ld) +
                              " vs " + std::to_string(traffic.loads) + ")");

    cur = res.activations;
    cur_region = regs.out;
  }

  mem.count_dram_out(cur.size());
  rep.frames_per_s = rep.total_cycles > 0 ? opt.freq_mhz * 1e6 / double(rep.total_cycles) : 0.0;
  rep.dram_in_bytes = mem.counters().dram_in_bytes;
  rep.dram_out_bytes = mem.counters().dram_out_bytes;
  rep.fifo_feedback_elems = mem.counters().fifo_feedback_elems;

  if (!opt.save_output.empty()) write_tmat(opt.save_output, cur);
  return rep;
}

}  // namespace tma
