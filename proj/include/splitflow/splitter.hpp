#pragma once

#include <string>
#include <vector>

#include "splitflow/delay.hpp"
#include "splitflow/profile.hpp"
#include "splitflow/split_dag.hpp"

namespace splitflow {

enum class SplitMethod { dag_mincut, linear_bruteforce, blockwise, oracle };

const char* to_string(SplitMethod m);

struct SplitDecision {
  Partition partition;
  Micros cut_value_us = 0;
  Micros delay_us = 0;
  SplitMethod method = SplitMethod::dag_mincut;
};

// End-to-end optimal split: chains are solved by prefix enumeration, other
// shapes by build -> restructure -> min cut -> map back. In consistent mode
// the cut value is cross-checked against the delay of the mapped partition
// and a mismatch aborts instead of returning a silently wrong split.
SplitDecision optimal_split(const ModelProfile& p, const NetParams& n);

// Evaluates all layer-count+1 prefix partitions of a chain profile; ties go
// to the smaller device set.
SplitDecision brute_force_linear(const ModelProfile& p, const NetParams& n);

// Reads a layer partition off a min-cut side assignment of a restructured
// graph. A layer fronted by an auxiliary takes the auxiliary's side (the
// auxiliary carries the layer's execution arcs); block vertices expand to
// their member layers; auxiliary and broadcast copies are dropped.
Partition map_cut_to_partition(const SplitDag& g, const std::vector<bool>& source_side);

// Shared by optimal_split and blockwise_split: restructure, run the min
// cut, map back, and cross-check.
SplitDecision mincut_split(const ModelProfile& p, const NetParams& n, SplitDag graph,
                           SplitMethod method);

}  // namespace splitflow
