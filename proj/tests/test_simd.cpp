#include <doctest.h>

#include <random>

#include "tma/simd.hpp"

using namespace tma;

namespace {

void fill_random(simd::LanePlanes& lanes, simd::PassPlanes& pass, std::mt19937_64& gen) {
  for (size_t i = 0; i < simd::kLanes; ++i) {
    const int32_t x = int32_t(gen() % 256);
    lanes.x[i] = x;
    lanes.negx[i] = -x;
    pass.s1[i] = int8_t(int(gen() % 3) - 1);
    pass.n1[i] = pass.s1[i] ? uint8_t(gen() % 8) : 0;
    pass.s2[i] = int8_t(int(gen() % 3) - 1);
    pass.n2[i] = pass.s2[i] ? uint8_t(gen() % 8) : 0;
  }
}

}  // namespace

TEST_CASE("active kernels match the scalar reference") {
  const auto& active = simd::active_kernels();
  const auto& scalar = simd::scalar_kernels();
  INFO("active kernel: ", active.name);

  std::mt19937_64 gen(31);
  simd::LanePlanes lanes;
  simd::PassPlanes pass;
  for (int trial = 0; trial < 300; ++trial) {
    fill_random(lanes, pass, gen);
    for (int col = 0; col < 4; ++col) {
      int32_t a[64], b[64];
      active.eval_column(lanes, pass, col, a);
      scalar.eval_column(lanes, pass, col, b);
      for (int i = 0; i < 64; ++i) CHECK(a[i] == b[i]);
    }
  }
}

TEST_CASE("kernels agree at the extremes") {
  const auto& active = simd::active_kernels();
  const auto& scalar = simd::scalar_kernels();
  simd::LanePlanes lanes;
  simd::PassPlanes pass;
  for (size_t i = 0; i < simd::kLanes; ++i) {
    lanes.x[i] = 255;
    lanes.negx[i] = -255;
    pass.s1[i] = -1;
    pass.n1[i] = 7;
    pass.s2[i] = 1;
    pass.n2[i] = 7;
  }
  for (int col = 0; col < 4; ++col) {
    int32_t a[64], b[64];
    active.eval_column(lanes, pass, col, a);
    scalar.eval_column(lanes, pass, col, b);
    for (int i = 0; i < 64; ++i) {
      CHECK(a[i] == b[i]);
      CHECK(a[i] == 0);  // the two terms cancel
    }
  }
  // one term only: 9 SAMs * 255 << 7
  for (size_t i = 0; i < simd::kLanes; ++i) pass.s1[i] = 0, pass.n1[i] = 0;
  int32_t a[64];
  active.eval_column(lanes, pass, 0, a);
  for (int i = 0; i < 64; ++i) CHECK(a[i] == 9 * (255 << 7));
}

TEST_CASE("scalar override is honored") {
  const bool prev = simd::scalar_forced();
  simd::set_force_scalar(true);
  CHECK(std::string(simd::active_name()) == "scalar");
  simd::set_force_scalar(false);
  CHECK(std::string(simd::active_name()) == simd::active_kernels().name);
  simd::set_force_scalar(prev);
}
