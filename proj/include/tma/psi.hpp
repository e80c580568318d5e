#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace tma {

// Weight precision of the multiplier-less datapath. INT5 weights decompose
// into one pair of signed power-of-two terms (N = 1), INT8 into two pairs
// (N = 2). Activations are always unsigned 8-bit.
enum class Precision : uint8_t { int5 = 0, int8 = 1 };

struct ModeInfo {
  int pairs;      // N: term pairs, one pair evaluated per pass
  int terms;      // 2N
  int w_min;      // two's-complement weight range
  int w_max;
  int max_shift;  // largest legal barrel-shift amount
};

constexpr ModeInfo mode_info(Precision p) {
  return p == Precision::int5 ? ModeInfo{1, 2, -16, 15, 4}
                              : ModeInfo{2, 4, -128, 127, 7};
}

const char* mode_name(Precision p);

// One signed power-of-two term s * 2^n with s in {-1, 0, +1}.
// A zero term is canonical: s == 0 implies n == 0.
struct PsiTerm {
  int8_t s = 0;
  uint8_t n = 0;

  bool operator==(const PsiTerm&) const = default;
};

// A weight decomposed into 2N terms, stored as N pass pairs:
// pair k occupies terms[2k] and terms[2k+1] and is evaluated on pass k.
struct PsiWeight {
  Precision mode = Precision::int5;
  std::array<PsiTerm, 4> terms{};  // first 2N entries valid, rest zero
  int16_t original = 0;

  bool operator==(const PsiWeight&) const = default;
};

// Exact rational, normalized with den > 0. Used for error bookkeeping so
// worst-case figures stay exact (1/11, not 0.0909...).
struct Rational {
  int64_t num = 0;
  int64_t den = 1;

  static Rational of(int64_t n, int64_t d);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;

  bool operator==(const Rational&) const = default;
};

bool operator<(const Rational& a, const Rational& b);

struct ErrorReport {
  int weight = 0;
  int effective = 0;
  int abs_error = 0;
  Rational rel_error;     // abs_error / |weight|, 0 when weight == 0
  int64_t index = -1;     // position within a tensor, -1 for scalar queries
};

// Tensor of decomposed weights; dims are row-major, data.size() == product.
struct PsiWeightTensor {
  std::vector<uint32_t> dims;
  std::vector<PsiWeight> data;

  size_t size() const { return data.size(); }
};

// Sum of the terms s * 2^n over all 2N entries: the effective weight.
int reconstruct(const PsiWeight& pw);

// Value computed on pass k (0-based): terms 2k and 2k+1 only.
int pass_value(const PsiWeight& pw, int pass);

// Best 2N-term decomposition of w. Minimizes |w - sum|; ties broken by
// smaller |sum| (round toward zero), then lexicographically smallest shift
// multiset, then a fixed canonical term order. Deterministic and pure.
PsiWeight decompose_weight(int w, Precision mode);

// Shift-and-add product: sum of s * (x << n). Equals reconstruct(pw) * x.
int64_t psi_multiply(const PsiWeight& pw, int x);

ErrorReport error_report(int w, Precision mode);

struct TensorDecomposition {
  PsiWeightTensor weights;
  std::vector<ErrorReport> inexact;  // one entry per weight whose abs_error > 0
};

TensorDecomposition decompose_tensor(const std::vector<int32_t>& weights,
                                     const std::vector<uint32_t>& dims, Precision mode);

// Exhaustive max of rel_error over the whole weight range of the mode.
Rational worst_case_relative_error(Precision mode);

}  // namespace tma
