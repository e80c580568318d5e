#include "tma/golden.hpp"

#include <limits>
#include <stdexcept>

namespace tma::golden {

namespace {

int32_t narrow(int64_t v) {
  if (v > std::numeric_limits<int32_t>::max() || v < std::numeric_limits<int32_t>::min())
    throw std::overflow_error("reference sum exceeds 32-bit output range");
  return int32_t(v);
}

}  // namespace

TensorI32 conv2d_ref(const TensorU8& input, const TensorI32& weights, const TensorI32& bias,
                     int s_h, int s_v, int pad) {
  if (input.dims.size() != 3 || weights.dims.size() != 4)
    throw std::invalid_argument("conv2d_ref expects input {H,W,C}, weights {K,kh,kw,C}");
  const int h = int(input.dims[0]), w = int(input.dims[1]), c = int(input.dims[2]);
  const int k = int(weights.dims[0]);
  const int kh = int(weights.dims[1]), kw = int(weights.dims[2]);
  if (int(weights.dims[3]) != c)
    throw std::invalid_argument("conv2d_ref channel mismatch");
  if (bias.dims.size() != 1 || int(bias.dims[0]) != k)
    throw std::invalid_argument("conv2d_ref bias shape mismatch");
  if (s_h < 1 || s_v < 1 || pad < 0) throw std::invalid_argument("conv2d_ref bad stride/pad");

  const int ho = (h + 2 * pad - kh) / s_v + 1;
  const int wo = (w + 2 * pad - kw) / s_h + 1;
  if (ho < 1 || wo < 1) throw std::invalid_argument("conv2d_ref empty output");

  TensorI32 out({uint32_t(ho), uint32_t(wo), uint32_t(k)});
  for (int oy = 0; oy < ho; ++oy)
    for (int ox = 0; ox < wo; ++ox)
      for (int f = 0; f < k; ++f) {
        int64_t acc = bias[size_t(f)];
        for (int ky = 0; ky < kh; ++ky)
          for (int kx = 0; kx < kw; ++kx) {
            const int y = oy * s_v + ky - pad;
            const int x = ox * s_h + kx - pad;
            if (y < 0 || y >= h || x < 0 || x >= w) continue;
            for (int ch = 0; ch < c; ++ch)
              acc += int64_t(weights[weights.idx4(f, ky, kx, ch)]) *
                     int64_t(input[input.idx3(y, x, ch)]);
          }
        out[out.idx3(oy, ox, f)] = narrow(acc);
      }
  return out;
}

TensorI32 effective_weights(const PsiWeightTensor& w) {
  TensorI32 out(w.dims);
  for (size_t i = 0; i < w.data.size(); ++i) out[i] = reconstruct(w.data[i]);
  return out;
}

TensorI32 quantized_ref(const TensorU8& input, const PsiWeightTensor& weights,
                        const TensorI32& bias, int s_h, int s_v, int pad) {
  return conv2d_ref(input, effective_weights(weights), bias, s_h, s_v, pad);
}

TensorI32 fc_ref(const TensorU8& input, const TensorI32& weights, const TensorI32& bias) {
  if (weights.dims.size() != 2 || input.dims.size() != 1)
    throw std::invalid_argument("fc_ref expects weights {K,C}, input {C}");
  const int k = int(weights.dims[0]), c = int(weights.dims[1]);
  if (int(input.dims[0]) != c) throw std::invalid_argument("fc_ref length mismatch");
  if (bias.dims.size() != 1 || int(bias.dims[0]) != k)
    throw std::invalid_argument("fc_ref bias shape mismatch");

  TensorI32 out({uint32_t(k)});
  for (int f = 0; f < k; ++f) {
    int64_t acc = bias[size_t(f)];
    for (int ch = 0; ch < c; ++ch)
      acc += int64_t(weights[size_t(f) * c + ch]) * int64_t(input[size_t(ch)]);
    out[size_t(f)] = narrow(acc);
  }
  return out;
}

TensorI32 quantized_fc_ref(const TensorU8& input, const PsiWeightTensor& weights,
                           const TensorI32& bias) {
  return fc_ref(input, effective_weights(weights), bias);
}

}  // namespace tma::golden
