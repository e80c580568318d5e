#include "tma/mapper.hpp"

#include <stdexcept>

namespace tma {

ExecutionPlan plan_layer(const LayerSpec& layer) {
  ExecutionPlan p;
  p.layer = layer;
  p.config = configure(layer);
  p.depth_tiles = p.config.depth_tiles;
  p.filter_groups = p.config.filter_groups;
  p.fc_tiles = p.config.fc_tiles;
  p.sweeps = layer.kind == LayerKind::fc ? 0 : p.config.h_out;
  return p;
}

std::vector<ExecutionPlan> plan_network(const NetworkSpec& net) {
  std::vector<ExecutionPlan> plans;
  plans.reserve(net.layers.size());
  for (const LayerSpec& l : net.layers) plans.push_back(plan_layer(l));
  return plans;
}

CycleStats cycle_model(const ExecutionPlan& p) {
  const ArrayConfig& c = p.config;
  CycleStats s;
  if (p.layer.kind == LayerKind::fc) {
    const int64_t tiles = int64_t(p.fc_tiles) * p.layer.k_out;
    s.shift_cycles = 12 * tiles;
    s.fill_cycles = 0;
    s.psi_extra_cycles = p.layer.precision == Precision::int8 ? tiles : 0;
    s.weight_load_events = tiles;
    return s;
  }
  const int64_t n_sweeps = int64_t(c.h_out) * c.depth_tiles * c.filter_groups;
  s.shift_cycles = n_sweeps * c.w_span;
  s.fill_cycles = n_sweeps * c.fill;
  if (p.layer.precision == Precision::int8)
    s.psi_extra_cycles = n_sweeps * ((c.w_span + c.fill) / c.s_h);
  s.weight_load_events = int64_t(c.depth_tiles) * c.filter_groups;
  return s;
}

PsumTraffic psum_traffic_model(const ExecutionPlan& p) {
  PsumTraffic t;
  if (p.layer.kind == LayerKind::fc) {
    t.stores = uint64_t(p.fc_tiles) * uint64_t(p.layer.k_out);
    t.loads = uint64_t(p.fc_tiles - 1) * uint64_t(p.layer.k_out);
    return t;
  }
  const uint64_t outputs =
      uint64_t(p.config.h_out) * uint64_t(p.config.w_out) * uint64_t(p.layer.k_out);
  t.stores = uint64_t(p.depth_tiles) * outputs;
  t.loads = uint64_t(p.depth_tiles - 1) * outputs;
  return t;
}

double peak_gmacs(double freq_mhz, Precision mode) {
  if (freq_mhz <= 0) throw std::invalid_argument("frequency must be positive");
  double peak = kPeakMacs * freq_mhz / 1000.0;
  return mode == Precision::int8 ? peak / 2 : peak;
}

ModelReport throughput_report(const std::vector<ExecutionPlan>& plans, double freq_mhz) {
  if (freq_mhz <= 0) throw std::invalid_argument("frequency must be positive");
  ModelReport r;
  r.freq_mhz = freq_mhz;
  for (const ExecutionPlan& p : plans) {
    LayerModelRow row;
    row.name = p.layer.name;
    row.kase = p.config.kase;
    row.precision = p.layer.precision;
    row.cycles = cycle_model(p);
    row.macs = p.layer.macs();
    row.traffic = psum_traffic_model(p);
    const int64_t cyc = row.cycles.total();
    row.effective_gmacs =
        cyc > 0 ? double(row.macs) / double(cyc) * freq_mhz / 1000.0 : 0.0;
    r.total_cycles += cyc;
    r.total_macs += row.macs;
    r.rows.push_back(row);
  }
  r.frames_per_s = r.total_cycles > 0 ? freq_mhz * 1e6 / double(r.total_cycles) : 0.0;
  return r;
}

}  // namespace tma
