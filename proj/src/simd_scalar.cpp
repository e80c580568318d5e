#include "tma/simd.hpp"

namespace tma::simd {

namespace {

inline int32_t term(int8_t s, uint8_t n, int32_t x, int32_t negx) {
  int32_t sel = s > 0 ? x : (s < 0 ? negx : 0);
  return sel << n;
}

void eval_column_scalar(const LanePlanes& lp, const PassPlanes& wp, int col, int32_t* out_ne) {
  for (int ner = 0; ner < 4; ++ner) {
    int32_t acc[kDepth] = {};
    for (int sr = 0; sr < 3; ++sr) {
      const int row = ner * 3 + sr;
      for (int p = 0; p < 3; ++p) {
        const size_t base = lane_index(row, col * 3 + p, 0);
        for (int d = 0; d < kDepth; ++d) {
          const size_t i = base + size_t(d);
          acc[d] += term(wp.s1[i], wp.n1[i], lp.x[i], lp.negx[i]);
          acc[d] += term(wp.s2[i], wp.n2[i], lp.x[i], lp.negx[i]);
        }
      }
    }
    for (int d = 0; d < kDepth; ++d) out_ne[ner * kDepth + d] = acc[d];
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{eval_column_scalar, "scalar"};
  return k;
}

}  // namespace tma::simd
