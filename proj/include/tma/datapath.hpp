#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tma/psi.hpp"

// Bit-exact unit models of the multiplier-less datapath: the GEN_NEG
// negation, the SAM select/shift block, the multi-operand adders with
// simplified sign extension (low parts summed, NUM_P negated at the top),
// and a single NE (9 SAMs + MOA18 + PSI accumulation). Functional sums are
// exact wide integers; 18-bit overflow is flagged, never wrapped.
namespace tma {

inline constexpr int kMoa18Operands = 18;
inline constexpr int kMoa66Operands = 66;
// Low-part width of MOA18 operands. INT8-pass PSIs reach +/-255 << 7, which
// needs 16-bit two's complement.
inline constexpr int kMoa18Width = 16;
inline constexpr int kMoa66Width = 32;
inline constexpr int64_t kSigned18Max = (1 << 17) - 1;
inline constexpr int64_t kSigned18Min = -(1 << 17);

// Two's-complement negation of an activation at the modeled register width
// (wide enough that -255 is representable).
int32_t gen_neg(int x);

// 3-1 mux: +1 -> x, -1 -> neg_x, 0 -> 0.
int32_t sam_select(int s, int32_t x, int32_t neg_x);

struct SamState {
  uint8_t x = 0;
  int32_t neg_x = 0;                 // carried alongside x; never recomputed locally
  std::array<PsiTerm, 4> terms{};    // stationary decomposed weight
  int pairs = 1;                     // N of the active mode
};

// The two PSIs of pass k (0-based): mux output shifted by the pass shifts.
std::pair<int64_t, int64_t> sam_eval(const SamState& s, int pass);

struct MoaResult {
  int64_t sum = 0;
  int num_p = 0;          // negative operands counted for the sign-extension fix
  bool overflow18 = false;
};

// Simplified-sign-extension reduction: sum of the unsigned low w bits of
// every operand, minus NUM_P * 2^w. Equals the exact arithmetic sum for any
// operands representable in w-bit two's complement; throws otherwise.
MoaResult moa_reduce(std::span<const int64_t> operands, int low_width);

// 18-operand MOA; flags (never wraps) results outside the signed 18-bit range.
MoaResult moa18(std::span<const int64_t> psis, int low_width = kMoa18Width);

// Column aggregator: 64 NE outputs + Psum + Bias, exact.
int64_t moa66(std::span<const int64_t> ne_outputs, int64_t psum, int64_t bias);

// One NE: 3x3 SAMs whose inputs form three horizontal shift chains
// (position 0 is the insert side), plus the PSI accumulator.
struct NeState {
  std::array<std::array<SamState, 3>, 3> sams{};  // [row][chain position]
  int pairs = 1;
  int64_t psum_acc = 0;
};

void ne_set_weights(NeState& ne, const std::array<std::array<PsiWeight, 3>, 3>& kernel);

// One SH_EN step: each row chain shifts by one, new values enter at
// position 0 (through GEN_NEG), evicted values are returned for feedback.
std::array<uint8_t, 3> ne_shift_in(NeState& ne, const std::array<uint8_t, 3>& new_column);

// MOA18 over the 18 PSIs of the 9 SAMs at the given pass.
MoaResult ne_compute(const NeState& ne, int pass);

// PSI accumulation across passes; a pass-through for N = 1.
int64_t psi_accumulate(int64_t acc, int64_t moa_out);

}  // namespace tma
