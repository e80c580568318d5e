#include "tma/simd.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace tma::simd {

namespace {

inline int32x4_t psi_quad(int32x4_t x, int32x4_t negx, int32x4_t s, int32x4_t n) {
  uint32x4_t pos = vcgtq_s32(s, vdupq_n_s32(0));
  uint32x4_t neg = vcltq_s32(s, vdupq_n_s32(0));
  int32x4_t v = vbslq_s32(pos, x, vdupq_n_s32(0));
  v = vbslq_s32(neg, negx, v);
  return vshlq_s32(v, n);  // left shift by per-lane counts
}

inline void accumulate_term(int32x4_t acc[4], const int32_t* x, const int32_t* negx,
                            const int8_t* s, const uint8_t* n) {
  int8x16_t s8 = vld1q_s8(s);
  uint8x16_t n8 = vld1q_u8(n);
  int16x8_t slo = vmovl_s8(vget_low_s8(s8)), shi = vmovl_s8(vget_high_s8(s8));
  uint16x8_t nlo = vmovl_u8(vget_low_u8(n8)), nhi = vmovl_u8(vget_high_u8(n8));
  int32x4_t sq[4] = {vmovl_s16(vget_low_s16(slo)), vmovl_s16(vget_high_s16(slo)),
                     vmovl_s16(vget_low_s16(shi)), vmovl_s16(vget_high_s16(shi))};
  int32x4_t nq[4] = {vreinterpretq_s32_u32(vmovl_u16(vget_low_u16(nlo))),
                     vreinterpretq_s32_u32(vmovl_u16(vget_high_u16(nlo))),
                     vreinterpretq_s32_u32(vmovl_u16(vget_low_u16(nhi))),
                     vreinterpretq_s32_u32(vmovl_u16(vget_high_u16(nhi)))};
  for (int q = 0; q < 4; ++q) {
    int32x4_t xv = vld1q_s32(x + 4 * q);
    int32x4_t gv = vld1q_s32(negx + 4 * q);
    acc[q] = vaddq_s32(acc[q], psi_quad(xv, gv, sq[q], nq[q]));
  }
}

void eval_column_neon(const LanePlanes& lp, const PassPlanes& wp, int col, int32_t* out_ne) {
  for (int ner = 0; ner < 4; ++ner) {
    int32x4_t acc[4] = {vdupq_n_s32(0), vdupq_n_s32(0), vdupq_n_s32(0), vdupq_n_s32(0)};
    for (int sr = 0; sr < 3; ++sr) {
      const int row = ner * 3 + sr;
      for (int p = 0; p < 3; ++p) {
        const size_t base = lane_index(row, col * 3 + p, 0);
        accumulate_term(acc, &lp.x[base], &lp.negx[base], &wp.s1[base], &wp.n1[base]);
        accumulate_term(acc, &lp.x[base], &lp.negx[base], &wp.s2[base], &wp.n2[base]);
      }
    }
    for (int q = 0; q < 4; ++q) vst1q_s32(out_ne + ner * kDepth + 4 * q, acc[q]);
  }
}

}  // namespace

const Kernels* neon_kernels_if_supported() {
  static const Kernels k{eval_column_neon, "neon"};
  return &k;
}

}  // namespace tma::simd

#else

namespace tma::simd {
const Kernels* neon_kernels_if_supported() { return nullptr; }
}  // namespace tma::simd

#endif
