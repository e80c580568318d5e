#pragma once

#include "tma/psi.hpp"
#include "tma/tensor.hpp"

// Brute-force integer references. These are the oracles the array engine is
// checked against bit-for-bit, so they stay deliberately naive: plain loops,
// 64-bit accumulation, no clever indexing.
namespace tma::golden {

// Exact integer cross-correlation (no kernel flip).
// input:   {H, W, C} u8
// weights: {K, kh, kw, C} i32
// bias:    {K} i32
// output:  {Ho, Wo, K} i32 with Ho = (H + 2*pad - kh) / sv + 1, same for Wo.
TensorI32 conv2d_ref(const TensorU8& input, const TensorI32& weights, const TensorI32& bias,
                     int s_h, int s_v, int pad);

// conv2d_ref with each weight replaced by reconstruct(psi_weight): the
// functional target the array must match exactly.
TensorI32 quantized_ref(const TensorU8& input, const PsiWeightTensor& weights,
                        const TensorI32& bias, int s_h, int s_v, int pad);

// Exact matrix-vector product: weights {K, C} i32, input {C} u8, bias {K}.
TensorI32 fc_ref(const TensorU8& input, const TensorI32& weights, const TensorI32& bias);

TensorI32 quantized_fc_ref(const TensorU8& input, const PsiWeightTensor& weights,
                           const TensorI32& bias);

// Effective integer weights of a PSI tensor.
TensorI32 effective_weights(const PsiWeightTensor& w);

}  // namespace tma::golden
