#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tma/layer.hpp"
#include "tma/memsys.hpp"

namespace tma {

struct LayerReportRow {
  std::string name;
  std::string kase;
  std::string precision;
  CycleStats cycles;
  int64_t macs = 0;
  double effective_gmacs = 0;
  uint64_t psum_stores = 0;
  uint64_t psum_loads = 0;
  bool simulated = false;
  bool bit_exact = false;
  int64_t overflow18_events = 0;
  std::map<std::string, RegionStats> sram;  // per-layer access deltas (simulated runs)
};

struct RunReport {
  std::string network;
  std::string mode;
  std::string precision;  // int5 | int8 | mixed
  double freq_mhz = 0;
  uint64_t seed = 0;
  std::string simd;

  std::vector<LayerReportRow> rows;
  int64_t total_cycles = 0;
  int64_t total_macs = 0;
  double frames_per_s = 0;
  double peak_gmacs_int5 = 0;
  double peak_gmacs_int8 = 0;
  uint64_t total_psum_stores = 0;
  uint64_t total_psum_loads = 0;
  uint64_t dram_in_bytes = 0;
  uint64_t dram_out_bytes = 0;
  uint64_t fifo_feedback_elems = 0;
};

// Modeling assumptions printed in every report so throughput figures can be
// judged; field order is fixed.
std::vector<std::pair<std::string, std::string>> report_assumptions();

std::string report_to_json(const RunReport& r);
std::string report_to_csv(const RunReport& r);

// format: "json" or "csv"; empty path writes to stdout.
void emit_report(const RunReport& r, const std::string& format, const std::string& path);

}  // namespace tma
