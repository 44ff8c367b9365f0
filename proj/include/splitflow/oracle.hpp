#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "splitflow/delay.hpp"
#include "splitflow/profile.hpp"
#include "splitflow/splitter.hpp"

namespace splitflow {

// Largest instance the exhaustive oracle accepts.
inline constexpr std::size_t kMaxOracleLayers = 22;

// Visits every consistent partition exactly once: device sets closed under
// ancestors, input pinned device-side. DFS over the topological order with
// parent-closure pruning, so the cost is proportional to the number of
// partitions emitted rather than 2^L.
void enumerate_partitions(const ModelProfile& p,
                          const std::function<void(const Partition&)>& visit);

std::size_t count_partitions(const ModelProfile& p);

// Same enumeration without the layer-count guard, capped by result count
// instead. Used where the candidate set itself is small even though the
// model is deep (static-cut calibration on the simulator fixtures).
std::vector<Partition> consistent_partitions(const ModelProfile& p,
                                             std::size_t max_partitions);

// Brute-force ground truth: argmin of training_delay over all consistent
// partitions. Ties go to the smaller device set, then lexicographic order.
SplitDecision oracle_optimal(const ModelProfile& p, const NetParams& n);

}  // namespace splitflow
