#include "tma/verify.hpp"

#include <cstdio>
#include <random>

#include "tma/datapath.hpp"
#include "tma/runner.hpp"
#include "tma/simd.hpp"

namespace tma::verify {

namespace {

void line(bool ok, const std::string& what) {
  std::printf("%s  %s\n", ok ? "ok  " : "FAIL", what.c_str());
}

}  // namespace

bool psi_suite() {
  bool ok = true;

  // INT8: exact everywhere
  for (int w = -128; w <= 127; ++w)
    if (reconstruct(decompose_weight(w, Precision::int8)) != w) ok = false;
  line(ok, "int8 decomposition exact for all 256 weights");

  // INT5: exact except +-11, +-13 with |error| 1
  bool ok5 = true;
  for (int w = -16; w <= 15; ++w) {
    const int err = error_report(w, Precision::int5).abs_error;
    const bool inexact = w == 11 || w == -11 || w == 13 || w == -13;
    if (err != (inexact ? 1 : 0)) ok5 = false;
  }
  line(ok5, "int5 decomposition inexact exactly at {-13,-11,11,13} with |error| 1");

  const bool worst = worst_case_relative_error(Precision::int5) == Rational{1, 11} &&
                     worst_case_relative_error(Precision::int8) == Rational{0, 1};
  line(worst, "worst relative error 1/11 (int5), 0 (int8)");
  return ok && ok5 && worst;
}

bool moa_suite(uint64_t seed, int random_cases) {
  bool ok = true;
  // exhaustive at 2- and 3-bit widths, six operands
  for (int width : {2, 3}) {
    const int lo = -(1 << (width - 1)), hi = (1 << (width - 1)) - 1;
    const int span = hi - lo + 1;
    int64_t total = 1;
    for (int i = 0; i < 6; ++i) total *= span;
    for (int64_t code = 0; code < total; ++code) {
      int64_t ops[6];
      int64_t c = code, direct = 0;
      for (int i = 0; i < 6; ++i) {
        ops[i] = lo + int(c % span);
        c /= span;
        direct += ops[i];
      }
      if (moa_reduce(std::span<const int64_t>(ops, 6), width).sum != direct) {
        ok = false;
        break;
      }
    }
  }
  line(ok, "sign-extension identity exhaustive, 6 operands at widths 2 and 3");

  bool okr = true;
  std::mt19937_64 gen(seed);
  for (int i = 0; i < random_cases; ++i) {
    int64_t ops[18];
    int64_t direct = 0;
    for (auto& op : ops) {
      op = int64_t(gen() % 32768) - 16384;  // 15-bit two's complement
      direct += op;
    }
    if (moa_reduce(std::span<const int64_t>(ops, 18), 15).sum != direct) {
      okr = false;
      break;
    }
  }
  line(okr, std::to_string(random_cases) + " random 18-operand reductions at width 15");
  return ok && okr;
}

bool simd_suite(uint64_t seed, int cases) {
  const auto& active = simd::active_kernels();
  const auto& scalar = simd::scalar_kernels();
  std::mt19937_64 gen(seed);
  bool ok = true;
  for (int c = 0; c < cases && ok; ++c) {
    simd::LanePlanes lanes;
    simd::PassPlanes pass;
    for (size_t i = 0; i < simd::kLanes; ++i) {
      const int32_t x = int32_t(gen() % 256);
      lanes.x[i] = x;
      lanes.negx[i] = -x;
      pass.s1[i] = int8_t(int(gen() % 3) - 1);
      pass.n1[i] = pass.s1[i] ? uint8_t(gen() % 8) : 0;
      pass.s2[i] = int8_t(int(gen() % 3) - 1);
      pass.n2[i] = pass.s2[i] ? uint8_t(gen() % 8) : 0;
    }
    for (int col = 0; col < 4; ++col) {
      int32_t a[64], b[64];
      active.eval_column(lanes, pass, col, a);
      scalar.eval_column(lanes, pass, col, b);
      for (int i = 0; i < 64; ++i)
        if (a[i] != b[i]) ok = false;
    }
  }
  line(ok, std::string("kernel '") + active.name + "' matches scalar reference on " +
               std::to_string(cases) + " random states");
  return ok;
}

LayerSpec random_case_layer(ExerciseCase c, Precision prec, uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto pick = [&](int lo, int hi) { return lo + int(gen() % uint64_t(hi - lo + 1)); };

  LayerSpec l;
  l.precision = prec;
  l.post.requant_shift = pick(10, 16);
  switch (c) {
    case ExerciseCase::conv3_s1:
      l.name = "conv3s1";
      l.k_h = l.k_w = pick(1, 3) == 1 ? 3 : pick(2, 3);  // mostly 3x3
      l.h_in = pick(8, 30);
      l.w_in = pick(8, 30);
      l.c_in = pick(1, 128);
      l.k_out = pick(1, 10);
      l.s_h = l.s_v = 1;
      l.pad = pick(0, 1);
      break;
    case ExerciseCase::conv3_sv2:
      l.name = "conv3sv2";
      l.k_h = l.k_w = 3;
      l.h_in = pick(9, 30);
      l.w_in = pick(9, 30);
      l.c_in = pick(1, 96);
      l.k_out = pick(1, 9);
      l.s_h = 1;
      l.s_v = 2;
      l.pad = pick(0, 1);
      break;
    case ExerciseCase::conv5:
      l.name = "conv5";
      l.k_h = l.k_w = pick(4, 5);
      l.h_in = pick(10, 28);
      l.w_in = pick(10, 28);
      l.c_in = pick(1, 80);
      l.k_out = pick(1, 6);
      l.s_h = l.s_v = 1;
      l.pad = pick(0, 2);
      break;
    case ExerciseCase::conv11_s4:
      l.name = "conv11s4";
      l.k_h = l.k_w = pick(6, 11);
      l.h_in = pick(l.k_h + 4, 32);
      l.w_in = pick(l.k_w + 4, 32);
      l.c_in = pick(1, 48);
      l.k_out = pick(1, 5);
      l.s_h = l.s_v = 4;
      l.pad = 0;
      break;
    case ExerciseCase::fc:
      l.name = "fc";
      l.kind = LayerKind::fc;
      l.h_in = l.w_in = 1;
      l.c_in = pick(1, 6000);
      l.k_out = pick(1, 12);
      break;
  }
  if (l.kind == LayerKind::conv && l.h_out() >= 4 && (gen() % 3) == 0) {
    l.post.pool_k = 2;
    l.post.pool_s = 2;
  }
  return l;
}

RunReport check_layer(const LayerSpec& layer, int input_h, int input_w, uint64_t seed) {
  NetworkSpec net;
  net.name = layer.name;
  net.h = layer.kind == LayerKind::fc ? 1 : input_h;
  net.w = layer.kind == LayerKind::fc ? 1 : input_w;
  net.c = layer.c_in;
  net.layers = {layer};

  RunOptions opt;
  opt.mode = "functional";
  opt.seed = seed;
  return run(net, opt);
}

bool layer_suite(uint64_t seed, int layers_per_case) {
  const ExerciseCase cases[] = {ExerciseCase::conv3_s1, ExerciseCase::conv3_sv2,
                                ExerciseCase::conv5, ExerciseCase::conv11_s4, ExerciseCase::fc};
  const char* names[] = {"conv3 s1", "conv3 sv2", "conv5", "conv11 s4", "fc"};
  bool all = true;
  for (size_t c = 0; c < 5; ++c) {
    bool ok = true;
    std::string detail;
    for (int i = 0; i < layers_per_case && ok; ++i) {
      for (Precision p : {Precision::int5, Precision::int8}) {
        const uint64_t s = seed + 1000 * c + uint64_t(i) * 2 + (p == Precision::int8);
        LayerSpec l = random_case_layer(cases[c], p, s);
        try {
          check_layer(l, l.h_in, l.w_in, s);
        } catch (const std::exception& e) {
          ok = false;
          detail = e.what();
          break;
        }
      }
    }
    line(ok, std::string(names[c]) + ": " + std::to_string(layers_per_case) +
                 " random layers bit-exact, both precisions" +
                 (ok ? "" : " -- " + detail));
    all = all && ok;
  }
  return all;
}

}  // namespace tma::verify
