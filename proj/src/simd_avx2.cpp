#include "tma/simd.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace tma::simd {

namespace {

// One 8-lane block of select-shift-accumulate. s widened from int8, n from
// uint8; select is implemented with two compare masks and byte blends, the
// shift with a per-lane variable shift.
__attribute__((target("avx2"))) inline __m256i psi_block(__m256i x, __m256i negx, __m256i s,
                                                         __m256i n) {
  const __m256i zero = _mm256_setzero_si256();
  __m256i pos = _mm256_cmpgt_epi32(s, zero);
  __m256i neg = _mm256_cmpgt_epi32(zero, s);
  __m256i v = _mm256_blendv_epi8(zero, x, pos);
  v = _mm256_blendv_epi8(v, negx, neg);
  return _mm256_sllv_epi32(v, n);
}

__attribute__((target("avx2"))) void eval_column_avx2(const LanePlanes& lp, const PassPlanes& wp,
                                                      int col, int32_t* out_ne) {
  for (int ner = 0; ner < 4; ++ner) {
    __m256i acc0 = _mm256_setzero_si256();
    __m256i acc1 = _mm256_setzero_si256();
    for (int sr = 0; sr < 3; ++sr) {
      const int row = ner * 3 + sr;
      for (int p = 0; p < 3; ++p) {
        const size_t base = lane_index(row, col * 3 + p, 0);
        __m256i x0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(&lp.x[base]));
        __m256i x1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(&lp.x[base + 8]));
        __m256i g0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(&lp.negx[base]));
        __m256i g1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(&lp.negx[base + 8]));

        __m128i s8 = _mm_load_si128(reinterpret_cast<const __m128i*>(&wp.s1[base]));
        __m128i n8 = _mm_load_si128(reinterpret_cast<const __m128i*>(&wp.n1[base]));
        acc0 = _mm256_add_epi32(acc0, psi_block(x0, g0, _mm256_cvtepi8_epi32(s8),
                                                _mm256_cvtepu8_epi32(n8)));
        acc1 = _mm256_add_epi32(acc1, psi_block(x1, g1,
                                                _mm256_cvtepi8_epi32(_mm_srli_si128(s8, 8)),
                                                _mm256_cvtepu8_epi32(_mm_srli_si128(n8, 8))));

        s8 = _mm_load_si128(reinterpret_cast<const __m128i*>(&wp.s2[base]));
        n8 = _mm_load_si128(reinterpret_cast<const __m128i*>(&wp.n2[base]));
        acc0 = _mm256_add_epi32(acc0, psi_block(x0, g0, _mm256_cvtepi8_epi32(s8),
                                                _mm256_cvtepu8_epi32(n8)));
        acc1 = _mm256_add_epi32(acc1, psi_block(x1, g1,
                                                _mm256_cvtepi8_epi32(_mm_srli_si128(s8, 8)),
                                                _mm256_cvtepu8_epi32(_mm_srli_si128(n8, 8))));
      }
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out_ne + ner * kDepth), acc0);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out_ne + ner * kDepth + 8), acc1);
  }
}

}  // namespace

const Kernels* avx2_kernels_if_supported() {
  static const Kernels k{eval_column_avx2, "avx2"};
  if (__builtin_cpu_supports("avx2")) return &k;
  return nullptr;
}

}  // namespace tma::simd

#else

namespace tma::simd {
const Kernels* avx2_kernels_if_supported() { return nullptr; }
}  // namespace tma::simd

#endif
