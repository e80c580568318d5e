#include <doctest.h>

#include <stdexcept>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "tma/network.hpp"
#include "tma/report.hpp"
#include "tma/runner.hpp"
#include "tma/tensor.hpp"

using namespace tma;

TEST_CASE("the bundled network file parses to 5 conv + 3 fc layers") {
  NetworkSpec net = load_network(std::string(TMA_DATA_DIR) + "/alexnet.net");
  REQUIRE(net.layers.size() == 8);
  int conv = 0, fc = 0;
  for (const auto& l : net.layers) (l.kind == LayerKind::conv ? conv : fc)++;
  CHECK(conv == 5);
  CHECK(fc == 3);
  CHECK(net.layers[0].h_out() == 55);
  CHECK(net.layers[0].h_final() == 27);  // after 3:2 pooling
  CHECK(net.layers[5].c_in == 9216);
  CHECK(net.layers[7].k_out == 1000);
}

TEST_CASE("network parser rejects bad input with line context") {
  CHECK_THROWS_WITH_AS(parse_network("", "net"), doctest::Contains("empty"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_network("input 8 8 4\nconv a kernel=3 filters=2 stride=-1\n", "net"),
      doctest::Contains("net:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_network("conv a kernel=3 filters=2\n", "net"), std::invalid_argument);
  CHECK_THROWS_AS(parse_network("input 8 8 4\nconv a kernel=3 filters=2 bogus=1\n", "net"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_network("input 8 8 4\nfc f outputs=4\nconv c kernel=3 filters=2\n", "net"),
                  std::invalid_argument);
  // valid: stride pairs, per-layer precision
  NetworkSpec ok = parse_network(
      "input 16 16 4\nprecision int8\nconv a kernel=3x3 filters=2 stride=1x2 pad=1 "
      "precision=int5\nfc f outputs=10\n",
      "net");
  CHECK(ok.layers[0].s_v == 2);
  CHECK(ok.layers[0].precision == Precision::int5);
  CHECK(ok.layers[1].precision == Precision::int8);
}

TEST_CASE("tmat files round-trip") {
  std::mt19937_64 gen(73);
  const std::string p8 = "/tmp/tma_test_u8.tmat";
  const std::string p32 = "/tmp/tma_test_i32.tmat";
  for (int trial = 0; trial < 10; ++trial) {
    TensorU8 t({uint32_t(1 + gen() % 6), uint32_t(1 + gen() % 6), uint32_t(1 + gen() % 6)});
    for (auto& v : t.data) v = uint8_t(gen() % 256);
    write_tmat(p8, t);
    AnyTensor back = read_tmat(p8);
    REQUIRE(back.dtype == Dtype::u8);
    CHECK(back.u8 == t);

    TensorI32 s({uint32_t(1 + gen() % 8), uint32_t(1 + gen() % 8)});
    for (auto& v : s.data) v = int32_t(gen());
    write_tmat(p32, s);
    AnyTensor back32 = read_tmat(p32);
    REQUIRE(back32.dtype == Dtype::i32);
    CHECK(back32.i32 == s);
  }
  std::remove(p8.c_str());
  std::remove(p32.c_str());
  CHECK_THROWS_AS(read_tmat("/tmp/definitely_missing.tmat"), std::runtime_error);
}

namespace {

NetworkSpec toy_net() {
  return parse_network(
      "input 10 12 8\n"
      "conv c1 kernel=3 filters=6 stride=1 pad=1 requant=12 pool=2:2\n"
      "conv c2 kernel=3 filters=4 stride=1 pad=0 requant=12\n"
      "fc f1 outputs=9 requant=12\n",
      "toy");
}

}  // namespace

TEST_CASE("functional runs are deterministic for a fixed seed") {
  RunOptions opt;
  opt.mode = "functional";
  opt.seed = 99;
  opt.freq_mhz = 250;
  NetworkSpec net = toy_net();
  RunReport a = run(net, opt);
  RunReport b = run(net, opt);
  CHECK(report_to_json(a) == report_to_json(b));
  CHECK(report_to_csv(a) == report_to_csv(b));
  for (const auto& row : a.rows) CHECK(row.bit_exact);
}

TEST_CASE("json report round-trips through a parse") {
  RunOptions opt;
  opt.mode = "stats";
  NetworkSpec net = toy_net();
  const std::string s1 = report_to_json(run(net, opt));
  const std::string s2 = nlohmann::ordered_json::parse(s1).dump(2) + "\n";
  CHECK(s1 == s2);
}

TEST_CASE("csv report has one row per layer plus totals") {
  RunOptions opt;
  opt.mode = "stats";
  NetworkSpec net = toy_net();
  const std::string csv = report_to_csv(run(net, opt));
  size_t rows = 0;
  for (char ch : csv) rows += ch == '\n';
  CHECK(rows == net.layers.size() + 2);  // header + layers + totals
}

TEST_CASE("precision override and frequency flow into the report") {
  RunOptions opt;
  opt.mode = "stats";
  opt.precision = Precision::int8;
  opt.freq_mhz = 250;
  RunReport rep = run(toy_net(), opt);
  CHECK(rep.precision == "int8");
  CHECK(rep.peak_gmacs_int5 == doctest::Approx(576.0));
  CHECK(rep.peak_gmacs_int8 == doctest::Approx(288.0));
  CHECK_THROWS_AS([&] {
    RunOptions bad;
    bad.mode = "nope";
    run(toy_net(), bad);
  }(), std::invalid_argument);
}

TEST_CASE("emit_report writes files") {
  RunOptions opt;
  opt.mode = "stats";
  RunReport rep = run(toy_net(), opt);
  const std::string path = "/tmp/tma_report_test.json";
  emit_report(rep, "json", path);
  std::ifstream is(path);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  CHECK(ss.str() == report_to_json(rep));
  std::remove(path.c_str());
  CHECK_THROWS_AS(emit_report(rep, "yaml", ""), std::invalid_argument);
}
