#include "tma/psi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>

namespace tma {

const char* mode_name(Precision p) { return p == Precision::int5 ? "int5" : "int8"; }

Rational Rational::of(int64_t n, int64_t d) {
  if (d == 0) throw std::invalid_argument("rational with zero denominator");
  if (d < 0) { n = -n; d = -d; }
  int64_t g = std::gcd(n < 0 ? -n : n, d);
  if (g == 0) g = 1;
  return Rational{n / g, d / g};
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

bool operator<(const Rational& a, const Rational& b) {
  return a.num * b.den < b.num * a.den;
}

int reconstruct(const PsiWeight& pw) {
  int v = 0;
  for (const PsiTerm& t : pw.terms) v += int(t.s) * (1 << t.n);
  return v;
}

int pass_value(const PsiWeight& pw, int pass) {
  const PsiTerm& a = pw.terms[2 * pass];
  const PsiTerm& b = pw.terms[2 * pass + 1];
  return int(a.s) * (1 << a.n) + int(b.s) * (1 << b.n);
}

int64_t psi_multiply(const PsiWeight& pw, int x) {
  if (x < 0 || x > 255)
    throw std::out_of_range("activation " + std::to_string(x) + " outside [0, 255]");
  int64_t v = 0;
  for (const PsiTerm& t : pw.terms) v += int64_t(t.s) * (int64_t(x) << t.n);
  return v;
}

namespace {

// Candidate ordering for the exhaustive search. Terms are kept in canonical
// order (shift descending, then sign descending) so that pass pairs and
// tie-breaks are reproducible.
void canonicalize(std::array<PsiTerm, 4>& t, int nt) {
  std::sort(t.begin(), t.begin() + nt, [](const PsiTerm& a, const PsiTerm& b) {
    if (a.n != b.n) return a.n > b.n;
    return a.s > b.s;
  });
}

struct Candidate {
  std::array<PsiTerm, 4> terms{};
  int value = 0;
};

// true if a is strictly better than b for target w
bool better(const Candidate& a, const Candidate& b, int w, int nterms) {
  int ea = std::abs(w - a.value), eb = std::abs(w - b.value);
  if (ea != eb) return ea < eb;
  int ma = std::abs(a.value), mb = std::abs(b.value);
  if (ma != mb) return ma < mb;  // round toward zero
  // smallest shift multiset, ascending lexicographic
  std::array<uint8_t, 4> sa{}, sb{};
  for (int i = 0; i < nterms; ++i) { sa[i] = a.terms[i].n; sb[i] = b.terms[i].n; }
  std::sort(sa.begin(), sa.begin() + nterms);
  std::sort(sb.begin(), sb.begin() + nterms);
  for (int i = 0; i < nterms; ++i)
    if (sa[i] != sb[i]) return sa[i] < sb[i];
  // final disambiguator: canonical (n, s) sequence
  for (int i = 0; i < nterms; ++i) {
    if (a.terms[i].n != b.terms[i].n) return a.terms[i].n < b.terms[i].n;
    if (a.terms[i].s != b.terms[i].s) return a.terms[i].s < b.terms[i].s;
  }
  return false;
}

std::vector<PsiTerm> term_kinds(int max_shift) {
  std::vector<PsiTerm> kinds;
  kinds.push_back(PsiTerm{0, 0});
  for (int8_t s : {int8_t(1), int8_t(-1)})
    for (int n = 0; n <= max_shift; ++n) kinds.push_back(PsiTerm{s, uint8_t(n)});
  return kinds;
}

// Exhaustive search over all term multisets for one weight.
PsiWeight search(int w, Precision mode) {
  const ModeInfo mi = mode_info(mode);
  const auto kinds = term_kinds(mi.max_shift);
  const int nk = int(kinds.size());

  Candidate best;
  bool have = false;
  std::array<int, 4> pick{};
  auto consider = [&](int nt) {
    Candidate c;
    for (int i = 0; i < nt; ++i) c.terms[i] = kinds[pick[i]];
    canonicalize(c.terms, nt);
    c.value = 0;
    for (int i = 0; i < nt; ++i) c.value += int(c.terms[i].s) * (1 << c.terms[i].n);
    if (!have || better(c, best, w, nt)) { best = c; have = true; }
  };

  if (mi.terms == 2) {
    for (pick[0] = 0; pick[0] < nk; ++pick[0])
      for (pick[1] = pick[0]; pick[1] < nk; ++pick[1]) consider(2);
  } else {
    for (pick[0] = 0; pick[0] < nk; ++pick[0])
      for (pick[1] = pick[0]; pick[1] < nk; ++pick[1])
        for (pick[2] = pick[1]; pick[2] < nk; ++pick[2])
          for (pick[3] = pick[2]; pick[3] < nk; ++pick[3]) consider(4);
  }

  PsiWeight pw;
  pw.mode = mode;
  pw.terms = best.terms;
  pw.original = int16_t(w);
  return pw;
}

const std::vector<PsiWeight>& table(Precision mode) {
  static std::vector<PsiWeight> t5, t8;
  static std::once_flag once5, once8;
  if (mode == Precision::int5) {
    std::call_once(once5, [] {
      const ModeInfo mi = mode_info(Precision::int5);
      for (int w = mi.w_min; w <= mi.w_max; ++w) t5.push_back(search(w, Precision::int5));
    });
    return t5;
  }
  std::call_once(once8, [] {
    const ModeInfo mi = mode_info(Precision::int8);
    for (int w = mi.w_min; w <= mi.w_max; ++w) t8.push_back(search(w, Precision::int8));
  });
  return t8;
}

}  // namespace

PsiWeight decompose_weight(int w, Precision mode) {
  const ModeInfo mi = mode_info(mode);
  if (w < mi.w_min || w > mi.w_max)
    throw std::out_of_range("weight " + std::to_string(w) + " outside " + mode_name(mode) +
                            " range [" + std::to_string(mi.w_min) + ", " +
                            std::to_string(mi.w_max) + "]");
  return table(mode)[size_t(w - mi.w_min)];
}

ErrorReport error_report(int w, Precision mode) {
  ErrorReport r;
  r.weight = w;
  r.effective = reconstruct(decompose_weight(w, mode));
  r.abs_error = std::abs(w - r.effective);
  r.rel_error = w == 0 ? Rational{0, 1} : Rational::of(r.abs_error, std::abs(w));
  return r;
}

TensorDecomposition decompose_tensor(const std::vector<int32_t>& weights,
                                     const std::vector<uint32_t>& dims, Precision mode) {
  size_t n = 1;
  for (uint32_t d : dims) n *= d;
  if (n != weights.size())
    throw std::invalid_argument("weight tensor dims do not match data length");

  TensorDecomposition out;
  out.weights.dims = dims;
  out.weights.data.reserve(weights.size());
  for (size_t i = 0; i < weights.size(); ++i) {
    PsiWeight pw;
    try {
      pw = decompose_weight(weights[i], mode);
    } catch (const std::out_of_range& e) {
      throw std::out_of_range(std::string(e.what()) + " at index " + std::to_string(i));
    }
    out.weights.data.push_back(pw);
    int eff = reconstruct(pw);
    if (eff != weights[i]) {
      ErrorReport r = error_report(weights[i], mode);
      r.index = int64_t(i);
      out.inexact.push_back(r);
    }
  }
  return out;
}

Rational worst_case_relative_error(Precision mode) {
  const ModeInfo mi = mode_info(mode);
  Rational worst{0, 1};
  for (int w = mi.w_min; w <= mi.w_max; ++w) {
    Rational r = error_report(w, mode).rel_error;
    if (worst < r) worst = r;
  }
  return worst;
}

}  // namespace tma
