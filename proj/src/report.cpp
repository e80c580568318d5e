#include "tma/report.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

namespace tma {

namespace {

using ordered_json = nlohmann::ordered_json;

// fixed-format doubles keep reports byte-stable across runs
double round6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

ordered_json cycles_json(const CycleStats& c) {
  return ordered_json{{"shift", c.shift_cycles},
                      {"fill", c.fill_cycles},
                      {"psi_extra", c.psi_extra_cycles},
                      {"weight_load_events", c.weight_load_events},
                      {"weight_load_cost", c.weight_load_cost},
                      {"total", c.total()}};
}

}  // namespace

std::vector<std::pair<std::string, std::string>> report_assumptions() {
  return {
      {"fill_cycles_per_sweep", "3 for conv3/conv5, 12 for conv11; fc tiles carry no separate "
                                "fill (the 12 shifts of a tile are the fill)"},
      {"weight_load_cost", "weight loads overlap compute (0 cycles per load event)"},
      {"int8_accumulation", "one extra PSI-accumulation cycle per h-stride shifts, fill "
                            "included; fc tiles take one extra cycle"},
      {"column_skew", "trailing windows of lagging columns are resolved during the next "
                      "stream and charged no cycles"},
      {"frame_rate_reference", "frame-rate comparisons use int8 weights"},
  };
}

std::string report_to_json(const RunReport& r) {
  ordered_json j;
  j["network"] = r.network;
  j["mode"] = r.mode;
  j["precision"] = r.precision;
  j["freq_mhz"] = round6(r.freq_mhz);
  j["seed"] = r.seed;
  j["simd"] = r.simd;
  ordered_json assume;
  for (const auto& [k, v] : report_assumptions()) assume[k] = v;
  j["assumptions"] = assume;

  ordered_json layers = ordered_json::array();
  for (const LayerReportRow& row : r.rows) {
    ordered_json lj;
    lj["layer"] = row.name;
    lj["case"] = row.kase;
    lj["precision"] = row.precision;
    lj["cycles"] = cycles_json(row.cycles);
    lj["macs"] = row.macs;
    lj["effective_gmacs"] = round6(row.effective_gmacs);
    lj["psum_stores"] = row.psum_stores;
    lj["psum_loads"] = row.psum_loads;
    if (row.simulated) {
      lj["bit_exact"] = row.bit_exact;
      lj["overflow18_events"] = row.overflow18_events;
      ordered_json sram;
      for (const auto& [name, st] : row.sram)
        sram[name] = ordered_json{{"reads", st.reads},
                                  {"writes", st.writes},
                                  {"read_bytes", st.read_bytes},
                                  {"write_bytes", st.write_bytes}};
      lj["sram"] = sram;
    }
    layers.push_back(lj);
  }
  j["layers"] = layers;

  ordered_json totals;
  totals["cycles"] = r.total_cycles;
  totals["macs"] = r.total_macs;
  totals["frames_per_s"] = round6(r.frames_per_s);
  totals["peak_gmacs_int5"] = round6(r.peak_gmacs_int5);
  totals["peak_gmacs_int8"] = round6(r.peak_gmacs_int8);
  totals["psum_stores"] = r.total_psum_stores;
  totals["psum_loads"] = r.total_psum_loads;
  totals["dram_in_bytes"] = r.dram_in_bytes;
  totals["dram_out_bytes"] = r.dram_out_bytes;
  totals["fifo_feedback_elems"] = r.fifo_feedback_elems;
  j["totals"] = totals;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const RunReport& r) {
  std::string out =
      "layer,case,precision,shift_cycles,fill_cycles,psi_extra_cycles,weight_load_events,"
      "total_cycles,macs,effective_gmacs,psum_stores,psum_loads,bit_exact,frames_per_s,"
      "peak_gmacs_int5,peak_gmacs_int8\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  for (const LayerReportRow& row : r.rows) {
    out += row.name + "," + row.kase + "," + row.precision + "," +
           std::to_string(row.cycles.shift_cycles) + "," +
           std::to_string(row.cycles.fill_cycles) + "," +
           std::to_string(row.cycles.psi_extra_cycles) + "," +
           std::to_string(row.cycles.weight_load_events) + "," +
           std::to_string(row.cycles.total()) + "," + std::to_string(row.macs) + "," +
           num(row.effective_gmacs) + "," + std::to_string(row.psum_stores) + "," +
           std::to_string(row.psum_loads) + "," +
           (row.simulated ? (row.bit_exact ? "true" : "false") : "") + ",,,\n";
  }
  const double eff = r.total_cycles > 0
                         ? double(r.total_macs) / double(r.total_cycles) * r.freq_mhz / 1000.0
                         : 0.0;
  out += "totals,,,,,,," + std::to_string(r.total_cycles) + "," + std::to_string(r.total_macs) +
         "," + num(eff) + "," + std::to_string(r.total_psum_stores) + "," +
         std::to_string(r.total_psum_loads) + ",," + num(r.frames_per_s) + "," +
         num(r.peak_gmacs_int5) + "," + num(r.peak_gmacs_int8) + "\n";
  return out;
}

void emit_report(const RunReport& r, const std::string& format, const std::string& path) {
  std::string body;
  if (format == "json")
    body = report_to_json(r);
  else if (format == "csv")
    body = report_to_csv(r);
  else
    throw std::invalid_argument("unknown report format: " + format);

  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << body;
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace tma
