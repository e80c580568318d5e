// Acceptance suite: prints one pass/fail line per criterion and exits
// nonzero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "tma/array.hpp"
#include "tma/datapath.hpp"
#include "tma/golden.hpp"
#include "tma/mapper.hpp"
#include "tma/network.hpp"
#include "tma/psi.hpp"
#include "tma/report.hpp"
#include "tma/runner.hpp"
#include "tma/verify.hpp"

using namespace tma;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. INT5 decomposition structure, worst relative error 1/11, under 1 s.
void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  int inexact = 0;
  for (int w = -16; w <= 15; ++w) {
    ErrorReport r = error_report(w, Precision::int5);
    const bool expect = w == 11 || w == -11 || w == 13 || w == -13;
    if (expect) {
      ++inexact;
      if (r.abs_error != 1) ok = false;
    } else if (r.abs_error != 0) {
      ok = false;
    }
  }
  ok = ok && inexact == 4;
  const Rational worst = worst_case_relative_error(Precision::int5);
  ok = ok && worst == Rational{1, 11};
  const double dt = seconds_since(t0);
  ok = ok && dt < 1.0;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "int5: inexact only at {-13,-11,11,13} with |error|=1, worst rel error %s "
                "(~%.2f%%), %.3fs",
                worst.str().c_str(), 100.0 * worst.value(), dt);
  report(1, ok, buf);
}

// 2. INT8 decomposition exact over all 256 weights, under 1 s.
void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  for (int w = -128; w <= 127; ++w)
    if (reconstruct(decompose_weight(w, Precision::int8)) != w) ok = false;
  ok = ok && worst_case_relative_error(Precision::int8) == Rational{0, 1};
  const double dt = seconds_since(t0);
  ok = ok && dt < 1.0;
  char buf[120];
  std::snprintf(buf, sizeof buf, "int8: all 256 weights exact, worst rel error 0, %.3fs", dt);
  report(2, ok, buf);
}

// 3. Simplified sign-extension identity: exhaustive small widths plus 1e6
//    random 18-operand reductions at width 15.
void criterion3() {
  bool ok = true;
  for (int width : {2, 3}) {
    const int lo = -(1 << (width - 1)), hi = (1 << (width - 1)) - 1;
    const int span = hi - lo + 1;
    int64_t total = 1;
    for (int i = 0; i < 6; ++i) total *= span;
    for (int64_t code = 0; code < total && ok; ++code) {
      int64_t ops[6];
      int64_t direct = 0, c = code;
      for (auto& op : ops) {
        op = lo + int(c % span);
        c /= span;
        direct += op;
      }
      if (moa_reduce(std::span<const int64_t>(ops, 6), width).sum != direct) ok = false;
    }
  }
  std::mt19937_64 gen(301);
  int match = 0;
  const int cases = 1000000;
  for (int i = 0; i < cases; ++i) {
    int64_t ops[18];
    int64_t direct = 0;
    for (auto& op : ops) {
      op = int64_t(gen() % 32768) - 16384;
      direct += op;
    }
    if (moa_reduce(std::span<const int64_t>(ops, 18), 15).sum == direct) ++match;
  }
  ok = ok && match == cases;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "sign-extension identity: exhaustive 6-operand widths 2-3, %d/%d random "
                "18-operand cases at w=15",
                match, cases);
  report(3, ok, buf);
}

// 4. End-to-end bit-exactness: 20 random desk-scale layers per case, both
//    precisions, zero tolerance, under 2 minutes.
void criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  using verify::ExerciseCase;
  const ExerciseCase cases[] = {ExerciseCase::conv3_s1, ExerciseCase::conv3_sv2,
                                ExerciseCase::conv5, ExerciseCase::conv11_s4, ExerciseCase::fc};
  const char* names[] = {"conv3 s1", "conv3 sv2", "conv5", "conv11 s4", "fc"};
  bool ok = true;
  std::string detail;
  int layers = 0;
  for (size_t c = 0; c < 5 && ok; ++c) {
    for (int i = 0; i < 20 && ok; ++i) {
      for (Precision p : {Precision::int5, Precision::int8}) {
        const uint64_t seed = 40000 + 997 * c + uint64_t(i) * 2 + (p == Precision::int8);
        LayerSpec l = verify::random_case_layer(cases[c], p, seed);
        try {
          verify::check_layer(l, l.h_in, l.w_in, seed);
          ++layers;
        } catch (const std::exception& e) {
          ok = false;
          detail = std::string(names[c]) + ": " + e.what();
          break;
        }
      }
    }
  }
  const double dt = seconds_since(t0);
  ok = ok && dt < 120.0;
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "bit-exactness: %d randomized layer runs across 5 cases x 2 precisions, %.1fs%s%s",
                layers, dt, detail.empty() ? "" : " -- ", detail.c_str());
  report(4, ok, buf);
}

// 5. Cycle-ratio reproduction on the bundled network plan.
void criterion5() {
  NetworkSpec net = load_network(std::string(TMA_DATA_DIR) + "/alexnet.net");
  auto ratio = [&](const LayerSpec& base) {
    LayerSpec l5 = base, l8 = base;
    l5.precision = Precision::int5;
    l8.precision = Precision::int8;
    return double(cycle_model(plan_layer(l8)).total()) /
           double(cycle_model(plan_layer(l5)).total());
  };
  bool ok = true;
  char buf[240];
  std::string detail;
  for (size_t i = 1; i <= 4; ++i) {
    const double r = ratio(net.layers[i]);
    detail += net.layers[i].name + "=" + std::to_string(r).substr(0, 5) + " ";
    if (r < 1.95 || r > 2.05) ok = false;
  }
  const double r1 = ratio(net.layers[0]);
  detail += "conv1=" + std::to_string(r1).substr(0, 5) + " ";
  if (r1 < 1.20 || r1 > 1.30) ok = false;
  for (size_t i = 5; i < 8; ++i) {
    const double r = ratio(net.layers[i]);
    if (r >= 1.10) ok = false;
  }
  detail += "fc=" + std::to_string(ratio(net.layers[5])).substr(0, 5);
  std::snprintf(buf, sizeof buf, "int8/int5 cycle ratios: %s", detail.c_str());
  report(5, ok, buf);
}

// 6. Peak throughput identity at 250 MHz.
void criterion6() {
  const double p5 = peak_gmacs(250.0, Precision::int5);
  const double p8 = peak_gmacs(250.0, Precision::int8);
  bool ok = p5 == 576.0 && p8 == 288.0 && kPeakMacs == 2304;

  // full-depth conv3 pass really occupies 2,304 lanes
  LayerSpec l;
  l.name = "full";
  l.h_in = l.w_in = 16;
  l.c_in = 64;
  l.k_out = 4;
  l.k_h = l.k_w = 3;
  ArrayConfig cfg = configure(l);
  TensorI32 w({4, 3, 3, 64});
  for (auto& v : w.data) v = 1;
  PsiWeightTensor psi = decompose_tensor(w.data, w.dims, Precision::int5).weights;
  ok = ok && load_weights(cfg, psi, 0, 0).active_lanes == 2304;

  report(6, ok, "peak 576 GMACS (int5) / 288 GMACS (int8) at 250 MHz; 2304 active lanes");
}

// 7. Psum multiplicity and traffic: per-step stores by case and counter /
//    closed-form equality on simulated layers.
void criterion7() {
  bool ok = true;
  std::string detail;
  // per-step multiplicity by case (full filter groups)
  struct Probe {
    LayerSpec l;
    int expect;
  };
  LayerSpec p1, p2, p3;
  p1.name = "m3";
  p1.h_in = 14;
  p1.w_in = 20;
  p1.c_in = 8;
  p1.k_out = 4;
  p1.k_h = p1.k_w = 3;
  p2 = p1;
  p2.name = "m5";
  p2.k_out = 2;
  p2.k_h = p2.k_w = 5;
  p3 = p1;
  p3.name = "m11";
  p3.k_out = 1;
  p3.k_h = p3.k_w = 11;
  p3.h_in = p3.w_in = 20;
  std::vector<Probe> probes = {{p1, 4}, {p2, 2}, {p3, 1}};
  for (const Probe& pr : probes) {
    ArrayConfig cfg = configure(pr.l);
    if (cfg.psums_per_step != pr.expect) ok = false;
    TensorI32 w({uint32_t(pr.l.k_out), uint32_t(pr.l.k_h), uint32_t(pr.l.k_w),
                 uint32_t(pr.l.c_in)});
    std::mt19937_64 gen(701);
    for (auto& v : w.data) v = int32_t(gen() % 31) - 15;
    PsiWeightTensor psi = decompose_tensor(w.data, w.dims, pr.l.precision).weights;
    ArraySim sim(cfg);
    sim.set_weights(load_weights(cfg, psi, 0, 0));
    sim.begin_stream(0);
    sim.ext_source = [](int, int, int) -> int64_t { return 0; };
    TensorU8 in({uint32_t(pr.l.h_in), uint32_t(pr.l.w_in), uint32_t(pr.l.c_in)});
    for (auto& v : in.data) v = uint8_t(gen() % 256);
    size_t max_step = 0;
    std::vector<uint8_t> buf;
    for (int s = 0; s < cfg.h_out; ++s)
      for (int x = 0; x < cfg.w_span; ++x) {
        buf.clear();
        for (const auto& f : sim.demand())
          for (int d = 0; d < f.n; ++d)
            buf.push_back(in[in.idx3(size_t(f.v), size_t(f.x), size_t(f.c0 + d))]);
        max_step = std::max(max_step, sim.input_shift(buf).outputs.size());
      }
    if (max_step != size_t(pr.expect)) ok = false;
    detail += std::to_string(max_step) + "/";
  }
  // counter vs closed form on simulated multi-tile layers (check_layer
  // throws if the memsys counters diverge from psum_traffic_model)
  using verify::ExerciseCase;
  try {
    for (auto c : {ExerciseCase::conv3_s1, ExerciseCase::conv5, ExerciseCase::fc}) {
      LayerSpec l = verify::random_case_layer(c, Precision::int5, 702);
      verify::check_layer(l, l.h_in, l.w_in, 702);
    }
  } catch (const std::exception& e) {
    ok = false;
    detail += std::string(" traffic: ") + e.what();
  }
  report(7, ok, "per-step psum stores " + detail + " by case {4,2,1}; counters match the "
                "closed-form traffic model");
}

// 8. Frame rate at 200 MHz against the published 62 frame/s, +-25%,
//    assumptions printed.
void criterion8() {
  NetworkSpec net = load_network(std::string(TMA_DATA_DIR) + "/alexnet.net");
  RunOptions opt;
  opt.mode = "stats";
  opt.freq_mhz = 200.0;
  opt.precision = Precision::int8;
  RunReport rep8 = run(net, opt);
  opt.precision = Precision::int5;
  RunReport rep5 = run(net, opt);

  const double fps = rep8.frames_per_s;
  const bool ok = fps >= 62.0 * 0.75 && fps <= 62.0 * 1.25;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "AlexNet at 200 MHz: %.1f frame/s (int8 reference) vs 62 +-25%% [46.5, 77.5]; "
                "int5 runs at %.1f frame/s",
                fps, rep5.frames_per_s);
  report(8, ok, buf);
  std::printf("       model assumptions:\n");
  for (const auto& [k, v] : report_assumptions())
    std::printf("         - %s: %s\n", k.c_str(), v.c_str());
}

// 9. Declared exclusions: power, accuracy and competitor comparisons are
//    out of scope; the property suites above substitute.
void criterion9() {
  report(9, true,
         "declared not desk-reproducible: power (mW, TMACs/W), Top-1 accuracy deltas, "
         "competitor comparison bars; substituted by the exhaustive and randomized suites "
         "above");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (failures) {
    std::printf("%d criterion(s) FAILED\n", failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
