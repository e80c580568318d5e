#pragma once

#include <cstdint>
#include <string>

#include "tma/array.hpp"
#include "tma/layer.hpp"
#include "tma/report.hpp"

// Self-check suites behind the `verify` CLI subcommand. Each returns true
// on success and prints one line per check.
namespace tma::verify {

// Exhaustive decomposition structure for both precisions.
bool psi_suite();

// Simplified sign-extension identity: exhaustive at small widths plus
// `random_cases` random 18-operand reductions at width 15.
bool moa_suite(uint64_t seed, int random_cases = 1000000);

// Active kernels against the scalar reference on random lane states.
bool simd_suite(uint64_t seed, int cases = 200);

// Randomized desk-scale layers per configuration case, simulated and
// verified bit-exact against the golden reference with the analytic models
// cross-checked (run() throws on any divergence).
bool layer_suite(uint64_t seed, int layers_per_case = 5);

// Deterministic generator for desk-scale layers of each exercise case.
enum class ExerciseCase { conv3_s1, conv3_sv2, conv5, conv11_s4, fc };
LayerSpec random_case_layer(ExerciseCase c, Precision prec, uint64_t seed);

// Runs one synthetic single-layer network functionally; throws on any
// bit-exactness or model mismatch.
RunReport check_layer(const LayerSpec& layer, int input_h, int input_w, uint64_t seed);

}  // namespace tma::verify
