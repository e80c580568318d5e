#include <doctest.h>

#include <stdexcept>

#include <random>

#include "tma/golden.hpp"

using namespace tma;

namespace {

// independent second implementation: plain six-loop valid/padded conv
TensorI32 conv_naive(const TensorU8& in, const TensorI32& w, const TensorI32& bias, int sh,
                     int sv, int pad) {
  const int H = int(in.dims[0]), W = int(in.dims[1]), C = int(in.dims[2]);
  const int K = int(w.dims[0]), kh = int(w.dims[1]), kw = int(w.dims[2]);
  const int ho = (H + 2 * pad - kh) / sv + 1;
  const int wo = (W + 2 * pad - kw) / sh + 1;
  TensorI32 out({uint32_t(ho), uint32_t(wo), uint32_t(K)});
  for (int f = 0; f < K; ++f)
    for (int oy = 0; oy < ho; ++oy)
      for (int ox = 0; ox < wo; ++ox) {
        int64_t acc = bias[size_t(f)];
        for (int ky = 0; ky < kh; ++ky)
          for (int kx = 0; kx < kw; ++kx)
            for (int c = 0; c < C; ++c) {
              const int y = oy * sv + ky - pad, x = ox * sh + kx - pad;
              if (y < 0 || y >= H || x < 0 || x >= W) continue;
              acc += int64_t(w[w.idx4(f, ky, kx, c)]) * in[in.idx3(y, x, c)];
            }
        out[out.idx3(oy, ox, f)] = int32_t(acc);
      }
  return out;
}

TensorU8 random_u8(std::vector<uint32_t> dims, std::mt19937_64& gen, int lim = 256) {
  TensorU8 t(std::move(dims));
  for (auto& v : t.data) v = uint8_t(gen() % lim);
  return t;
}

}  // namespace

TEST_CASE("identity kernel copies the input") {
  TensorU8 in({4, 5, 1});
  for (size_t i = 0; i < in.size(); ++i) in[i] = uint8_t(i * 7 % 256);
  TensorI32 w({1, 1, 1, 1});
  w[0] = 1;
  TensorI32 bias({1});
  TensorI32 out = golden::conv2d_ref(in, w, bias, 1, 1, 0);
  REQUIRE(out.dims == std::vector<uint32_t>{4, 5, 1});
  for (size_t i = 0; i < in.size(); ++i) CHECK(out[i] == int32_t(in[i]));
}

TEST_CASE("all-ones 3x3 kernel over constant-1 input") {
  TensorU8 in({5, 5, 1});
  for (auto& v : in.data) v = 1;
  TensorI32 w({1, 3, 3, 1});
  for (auto& v : w.data) v = 1;
  TensorI32 bias({1});
  TensorI32 out = golden::conv2d_ref(in, w, bias, 1, 1, 0);
  for (auto v : out.data) CHECK(v == 9);
}

TEST_CASE("conv2d_ref matches an independent naive implementation") {
  std::mt19937_64 gen(37);
  for (int trial = 0; trial < 25; ++trial) {
    const int H = 4 + int(gen() % 10), W = 4 + int(gen() % 10), C = 1 + int(gen() % 8);
    const int K = 1 + int(gen() % 4);
    const int kh = 1 + int(gen() % 3), kw = 1 + int(gen() % 3);
    const int sh = 1 + int(gen() % 2), sv = 1 + int(gen() % 2);
    const int pad = int(gen() % 2);
    if ((H + 2 * pad - kh) / sv + 1 < 1 || (W + 2 * pad - kw) / sh + 1 < 1) continue;
    TensorU8 in = random_u8({uint32_t(H), uint32_t(W), uint32_t(C)}, gen);
    TensorI32 w({uint32_t(K), uint32_t(kh), uint32_t(kw), uint32_t(C)});
    for (auto& v : w.data) v = int32_t(gen() % 256) - 128;
    TensorI32 bias({uint32_t(K)});
    for (auto& v : bias.data) v = int32_t(gen() % 100) - 50;
    CHECK(golden::conv2d_ref(in, w, bias, sh, sv, pad) == conv_naive(in, w, bias, sh, sv, pad));
  }
}

TEST_CASE("quantized_ref with int8 weights equals the plain reference") {
  std::mt19937_64 gen(41);
  TensorU8 in = random_u8({8, 8, 6}, gen);
  TensorI32 w({2, 3, 3, 6});
  for (auto& v : w.data) v = int32_t(gen() % 256) - 128;
  TensorI32 bias({2});
  bias.data = {5, -3};
  auto dec = decompose_tensor(w.data, w.dims, Precision::int8);
  CHECK(golden::quantized_ref(in, dec.weights, bias, 1, 1, 1) ==
        golden::conv2d_ref(in, w, bias, 1, 1, 1));
}

TEST_CASE("quantized_ref substitutes effective weights") {
  std::mt19937_64 gen(43);
  TensorU8 in = random_u8({6, 6, 2}, gen);
  TensorI32 w11({1, 3, 3, 2});
  for (auto& v : w11.data) v = 11;
  TensorI32 w10 = w11;
  for (auto& v : w10.data) v = 10;
  TensorI32 bias({1});
  auto dec = decompose_tensor(w11.data, w11.dims, Precision::int5);
  CHECK(golden::quantized_ref(in, dec.weights, bias, 1, 1, 0) ==
        golden::conv2d_ref(in, w10, bias, 1, 1, 0));

  for (auto& v : w11.data) v = 0;
  auto zdec = decompose_tensor(w11.data, w11.dims, Precision::int5);
  for (auto v : golden::quantized_ref(in, zdec.weights, bias, 1, 1, 0).data) CHECK(v == 0);
}

TEST_CASE("reference convolution is linear") {
  std::mt19937_64 gen(47);
  TensorU8 a = random_u8({7, 7, 3}, gen, 120);
  TensorU8 b = random_u8({7, 7, 3}, gen, 120);
  TensorU8 ab({7, 7, 3});
  for (size_t i = 0; i < ab.size(); ++i) ab[i] = uint8_t(a[i] + b[i]);
  TensorI32 w({2, 3, 3, 3});
  for (auto& v : w.data) v = int32_t(gen() % 31) - 15;
  TensorI32 zero_bias({2});
  TensorI32 ra = golden::conv2d_ref(a, w, zero_bias, 1, 1, 0);
  TensorI32 rb = golden::conv2d_ref(b, w, zero_bias, 1, 1, 0);
  TensorI32 rab = golden::conv2d_ref(ab, w, zero_bias, 1, 1, 0);
  for (size_t i = 0; i < rab.size(); ++i) CHECK(rab[i] == ra[i] + rb[i]);
}

TEST_CASE("fc_ref") {
  SUBCASE("identity matrix returns the input") {
    TensorU8 in({4});
    in.data = {9, 8, 7, 6};
    TensorI32 w({4, 4});
    for (int i = 0; i < 4; ++i) w[size_t(i * 4 + i)] = 1;
    TensorI32 bias({4});
    TensorI32 out = golden::fc_ref(in, w, bias);
    for (int i = 0; i < 4; ++i) CHECK(out[size_t(i)] == int32_t(in[size_t(i)]));
  }
  SUBCASE("ones matrix sums 2304 ones") {
    TensorU8 in({2304});
    for (auto& v : in.data) v = 1;
    TensorI32 w({1, 2304});
    for (auto& v : w.data) v = 1;
    TensorI32 bias({1});
    CHECK(golden::fc_ref(in, w, bias)[0] == 2304);
  }
  SUBCASE("zero input returns the bias") {
    TensorU8 in({5});
    TensorI32 w({2, 5});
    for (auto& v : w.data) v = 44;
    TensorI32 bias({2});
    bias.data = {17, -9};
    TensorI32 out = golden::fc_ref(in, w, bias);
    CHECK(out[0] == 17);
    CHECK(out[1] == -9);
  }
  SUBCASE("dimension mismatch is rejected") {
    TensorU8 in({4});
    TensorI32 w({2, 5});
    TensorI32 bias({2});
    CHECK_THROWS_AS(golden::fc_ref(in, w, bias), std::invalid_argument);
  }
}
