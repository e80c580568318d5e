#include "tma/datapath.hpp"

#include <stdexcept>
#include <string>

namespace tma {

int32_t gen_neg(int x) {
  if (x < 0 || x > 255)
    throw std::out_of_range("activation " + std::to_string(x) + " outside [0, 255]");
  return -x;
}

int32_t sam_select(int s, int32_t x, int32_t neg_x) {
  if (s > 0) return x;
  if (s < 0) return neg_x;
  return 0;
}

std::pair<int64_t, int64_t> sam_eval(const SamState& s, int pass) {
  if (pass < 0 || pass >= s.pairs) throw std::out_of_range("pass index out of range");
  const PsiTerm& t1 = s.terms[size_t(2 * pass)];
  const PsiTerm& t2 = s.terms[size_t(2 * pass + 1)];
  int64_t p1 = int64_t(sam_select(t1.s, s.x, s.neg_x)) << t1.n;
  int64_t p2 = int64_t(sam_select(t2.s, s.x, s.neg_x)) << t2.n;
  return {p1, p2};
}

MoaResult moa_reduce(std::span<const int64_t> operands, int low_width) {
  if (low_width < 1 || low_width > 62) throw std::invalid_argument("moa low width out of range");
  const int64_t lo = -(int64_t(1) << (low_width - 1));
  const int64_t hi = (int64_t(1) << (low_width - 1)) - 1;
  const uint64_t mask = (uint64_t(1) << low_width) - 1;

  uint64_t low_sum = 0;
  int num_p = 0;
  for (int64_t op : operands) {
    if (op < lo || op > hi)
      throw std::domain_error("moa operand " + std::to_string(op) + " not representable in " +
                              std::to_string(low_width) + "-bit two's complement");
    low_sum += uint64_t(op) & mask;
    if (op < 0) ++num_p;
  }
  MoaResult r;
  r.num_p = num_p;
  // the extended sign bits of all negative operands collapse to -NUM_P << w
  r.sum = int64_t(low_sum) - (int64_t(num_p) << low_width);
  return r;
}

MoaResult moa18(std::span<const int64_t> psis, int low_width) {
  if (psis.size() != kMoa18Operands)
    throw std::invalid_argument("moa18 takes exactly 18 operands, got " +
                                std::to_string(psis.size()));
  MoaResult r = moa_reduce(psis, low_width);
  r.overflow18 = r.sum > kSigned18Max || r.sum < kSigned18Min;
  return r;
}

int64_t moa66(std::span<const int64_t> ne_outputs, int64_t psum, int64_t bias) {
  if (ne_outputs.size() != 64)
    throw std::invalid_argument("moa66 takes exactly 64 NE outputs, got " +
                                std::to_string(ne_outputs.size()));
  std::array<int64_t, kMoa66Operands> ops;
  for (size_t i = 0; i < 64; ++i) ops[i] = ne_outputs[i];
  ops[64] = psum;
  ops[65] = bias;
  return moa_reduce(ops, kMoa66Width).sum;
}

void ne_set_weights(NeState& ne, const std::array<std::array<PsiWeight, 3>, 3>& kernel) {
  // kernel column kx lands at chain position 2 - kx: the chain's insert side
  // holds the newest (rightmost) image column.
  for (int ky = 0; ky < 3; ++ky)
    for (int kx = 0; kx < 3; ++kx) {
      SamState& s = ne.sams[size_t(ky)][size_t(2 - kx)];
      s.terms = kernel[size_t(ky)][size_t(kx)].terms;
      s.pairs = ne.pairs;
    }
}

std::array<uint8_t, 3> ne_shift_in(NeState& ne, const std::array<uint8_t, 3>& new_column) {
  std::array<uint8_t, 3> evicted{};
  for (int row = 0; row < 3; ++row) {
    auto& chain = ne.sams[size_t(row)];
    evicted[size_t(row)] = chain[2].x;
    for (int p = 2; p > 0; --p) {
      chain[size_t(p)].x = chain[size_t(p - 1)].x;
      chain[size_t(p)].neg_x = chain[size_t(p - 1)].neg_x;
    }
    chain[0].x = new_column[size_t(row)];
    chain[0].neg_x = gen_neg(new_column[size_t(row)]);
  }
  return evicted;
}

MoaResult ne_compute(const NeState& ne, int pass) {
  std::array<int64_t, kMoa18Operands> psis;
  size_t i = 0;
  for (const auto& row : ne.sams)
    for (const SamState& s : row) {
      auto [p1, p2] = sam_eval(s, pass);
      psis[i++] = p1;
      psis[i++] = p2;
    }
  return moa18(psis);
}

int64_t psi_accumulate(int64_t acc, int64_t moa_out) { return acc + moa_out; }

}  // namespace tma
