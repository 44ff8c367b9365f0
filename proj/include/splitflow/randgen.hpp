#pragma once

#include <cstdint>

#include "splitflow/delay.hpp"
#include "splitflow/profile.hpp"

namespace splitflow {

// Seeded instance generators for the equivalence suites. Byte sizes are
// multiples of 8 and rates divide 8 MB/s exactly, so transfer times carry
// no rounding and the optimality comparisons are exact.
struct RandomProfileOptions {
  int min_layers = 4;
  int max_layers = 12;
  bool ensure_nonlinear = true;
  // Assemble the model from annotated block templates (chain, residual,
  // parallel) glued by plain layers; some blocks draw a tiny internal
  // activation and fail the intra-block test on purpose.
  bool with_blocks = false;
};

ModelProfile random_profile(std::uint64_t seed, const RandomProfileOptions& opt = {});

NetParams random_net_params(std::uint64_t seed);

}  // namespace splitflow
