#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "tma/layer.hpp"
#include "tma/report.hpp"
#include "tma/tensor.hpp"

namespace tma {

struct RunOptions {
  std::string mode = "stats";  // stats | functional | both
  std::optional<Precision> precision;
  double freq_mhz = 250.0;
  uint64_t seed = 1;
  std::string input_tmat;    // optional input tensor; random from seed when empty
  std::string save_output;   // optional TMAT path for the final activations
};

// Thrown when a simulated layer does not match the golden reference or the
// measured counters drift from the analytic models.
struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic per-seed tensors used for functional runs.
TensorU8 random_input(int h, int w, int c, uint64_t seed);
TensorI32 random_weights(const LayerSpec& l, uint64_t seed);
TensorI32 random_bias(int k, uint64_t seed);

// Runs the network. stats: analytic models only. functional/both: every
// layer is simulated on the array, verified bit-exact against the golden
// reference, and the measured cycles and Psum traffic are checked against
// the closed-form models.
RunReport run(const NetworkSpec& net, const RunOptions& opt);

}  // namespace tma
