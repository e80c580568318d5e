#include <doctest.h>

#include <stdexcept>

#include <random>

#include "tma/mapper.hpp"
#include "tma/network.hpp"
#include "tma/verify.hpp"

using namespace tma;

namespace {

NetworkSpec alexnet() { return load_network(std::string(TMA_DATA_DIR) + "/alexnet.net"); }

CycleStats model_for(const LayerSpec& base, Precision p) {
  LayerSpec l = base;
  l.precision = p;
  return cycle_model(plan_layer(l));
}

double int8_ratio(const LayerSpec& l) {
  return double(model_for(l, Precision::int8).total()) /
         double(model_for(l, Precision::int5).total());
}

}  // namespace

TEST_CASE("plans for the bundled network") {
  NetworkSpec net = alexnet();
  auto plans = plan_network(net);
  REQUIRE(plans.size() == 8);

  // conv1: 11x11x3, 96 filters, stride 4
  CHECK(plans[0].config.kase == ArrayCase::conv11);
  CHECK(plans[0].depth_tiles == 1);
  CHECK(plans[0].filter_groups == 96);
  CHECK(plans[0].config.h_out == 55);

  // conv2: 5x5, 256 filters over 96 channels
  CHECK(plans[1].config.kase == ArrayCase::conv5);
  CHECK(plans[1].depth_tiles == 3);
  CHECK(plans[1].filter_groups == 128);

  // conv3: 3x3, 384 filters over 256 channels
  CHECK(plans[2].config.kase == ArrayCase::conv3);
  CHECK(plans[2].depth_tiles == 4);
  CHECK(plans[2].filter_groups == 96);

  // fc1: 9216 -> 4096
  CHECK(plans[5].config.kase == ArrayCase::fc);
  CHECK(plans[5].layer.c_in == 9216);
  CHECK(plans[5].fc_tiles == 4);
}

TEST_CASE("int8/int5 cycle ratios") {
  NetworkSpec net = alexnet();
  // conv2..conv5 at horizontal stride 1: twice the cycles
  for (size_t i = 1; i <= 4; ++i) {
    const double r = int8_ratio(net.layers[i]);
    CHECK(r == doctest::Approx(2.0).epsilon(0.025));
  }
  // conv1 at stride 4: one extra accumulation every 4 shifts
  CHECK(int8_ratio(net.layers[0]) == doctest::Approx(1.25).epsilon(0.04));
  // fc: 13 cycles per 12-shift tile
  for (size_t i = 5; i < 8; ++i) {
    const double r = int8_ratio(net.layers[i]);
    CHECK(r == doctest::Approx(13.0 / 12.0).epsilon(1e-9));
    CHECK(r < 1.10);
  }
}

TEST_CASE("psum traffic closed form") {
  // single depth tile: no reloads
  LayerSpec l1;
  l1.name = "a";
  l1.h_in = l1.w_in = 16;
  l1.c_in = 64;
  l1.k_out = 4;
  l1.k_h = l1.k_w = 3;
  l1.pad = 1;
  PsumTraffic t1 = psum_traffic_model(plan_layer(l1));
  CHECK(t1.loads == 0);
  CHECK(t1.stores == uint64_t(16 * 16 * 4));

  // 3 tiles over a 13x13x384 output
  LayerSpec l2 = l1;
  l2.h_in = l2.w_in = 13;
  l2.c_in = 192;  // 3 tiles of 64
  l2.k_out = 384;
  PsumTraffic t2 = psum_traffic_model(plan_layer(l2));
  CHECK(t2.loads == uint64_t(2) * 13 * 13 * 384);
  CHECK(t2.stores == uint64_t(3) * 13 * 13 * 384);

  // fc with 4 tiles per output
  LayerSpec fc;
  fc.kind = LayerKind::fc;
  fc.name = "fc";
  fc.h_in = fc.w_in = 1;
  fc.c_in = 9216;
  fc.k_out = 4096;
  PsumTraffic tf = psum_traffic_model(plan_layer(fc));
  CHECK(tf.loads == uint64_t(3) * 4096);
  CHECK(tf.stores == uint64_t(4) * 4096);
  // 9216 inputs tile into 4 passes of 2304: 48 shifts per output
  CHECK(cycle_model(plan_layer(fc)).shift_cycles == int64_t(48) * 4096);
}

TEST_CASE("peak throughput identity") {
  CHECK(peak_gmacs(250.0, Precision::int5) == doctest::Approx(576.0).epsilon(1e-12));
  CHECK(peak_gmacs(250.0, Precision::int8) == doctest::Approx(288.0).epsilon(1e-12));
  CHECK(kPeakMacs == 2304);
}

TEST_CASE("cycles are monotone in every layer dimension") {
  std::mt19937_64 gen(67);
  for (int trial = 0; trial < 60; ++trial) {
    LayerSpec l;
    l.name = "m";
    l.h_in = 8 + int(gen() % 20);
    l.w_in = 8 + int(gen() % 20);
    l.c_in = 1 + int(gen() % 128);
    l.k_out = 1 + int(gen() % 12);
    l.k_h = l.k_w = 3;
    l.pad = 1;
    l.precision = trial % 2 ? Precision::int8 : Precision::int5;
    const int64_t base = cycle_model(plan_layer(l)).total();

    LayerSpec lh = l;
    lh.h_in += 1 + int(gen() % 8);
    CHECK(cycle_model(plan_layer(lh)).total() >= base);
    LayerSpec lw = l;
    lw.w_in += 1 + int(gen() % 8);
    CHECK(cycle_model(plan_layer(lw)).total() >= base);
    LayerSpec lc = l;
    lc.c_in += 1 + int(gen() % 64);
    CHECK(cycle_model(plan_layer(lc)).total() >= base);
    LayerSpec lk = l;
    lk.k_out += 1 + int(gen() % 8);
    CHECK(cycle_model(plan_layer(lk)).total() >= base);
  }
}

TEST_CASE("throughput report totals") {
  NetworkSpec net = alexnet();
  auto plans = plan_network(net);
  ModelReport rep = throughput_report(plans, 200.0);
  int64_t sum = 0;
  for (const auto& row : rep.rows) sum += row.cycles.total();
  CHECK(rep.total_cycles == sum);
  CHECK(rep.frames_per_s == doctest::Approx(200e6 / double(sum)));
  CHECK_THROWS_AS(throughput_report(plans, 0.0), std::invalid_argument);
}

TEST_CASE("analytic model matches the measured run") {
  // check_layer() throws if cycle_model or psum_traffic_model diverge from
  // the simulated counters; exercise one layer of each case here
  using verify::ExerciseCase;
  for (auto c : {ExerciseCase::conv3_s1, ExerciseCase::conv5, ExerciseCase::conv11_s4,
                 ExerciseCase::fc}) {
    LayerSpec l = verify::random_case_layer(c, Precision::int8, 71);
    CHECK_NOTHROW(verify::check_layer(l, l.h_in, l.w_in, 71));
  }
}
