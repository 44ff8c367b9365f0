#include "splitflow/splitter.hpp"

#include <algorithm>

#include "splitflow/maxflow.hpp"

namespace splitflow {

const char* to_string(SplitMethod m) {
  switch (m) {
    case SplitMethod::dag_mincut: return "dag-mincut";
    case SplitMethod::linear_bruteforce: return "linear-bruteforce";
    case SplitMethod::blockwise: return "blockwise";
    case SplitMethod::oracle: return "oracle";
  }
  return "?";
}

Partition map_cut_to_partition(const SplitDag& g, const std::vector<bool>& source_side) {
  auto resolved_side = [&](int v) {
    const int aux = g.vertices[v].proxied_by;
    return aux >= 0 ? source_side[aux] : source_side[v];
  };
  Partition c;
  for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) {
    const auto& vert = g.vertices[v];
    if (vert.kind == VertexKind::layer) {
      if (vert.id == kInputId) continue;  // implicit, always device-side
      if (resolved_side(v)) c.device.insert(vert.id);
    } else if (vert.kind == VertexKind::block) {
      if (resolved_side(v))
        for (const auto& m : g.block_members.at(vert.id)) c.device.insert(m);
    }
  }
  return c;
}

SplitDecision mincut_split(const ModelProfile& p, const NetParams& n, SplitDag graph,
                           SplitMethod method) {
  SplitDag restructured = restructure(std::move(graph));
  FlowNetwork net = to_flow_network(restructured);
  const FlowNetwork::Cut cut = net.min_cut();

  SplitDecision d;
  d.method = method;
  d.cut_value_us = cut.value;
  d.partition = map_cut_to_partition(restructured, cut.source_side);

  if (!is_consistent_partition(p, d.partition)) {
    for (const auto& [u, v] : p.edges)
      if (!d.partition.on_device(u) && d.partition.on_device(v))
        throw Error("optimal_split: mapped partition is inconsistent at edge (" + u +
                    "," + v + "); the profile likely violates the server-strength "
                    "assumption or the weight mode does not match");
    throw Error("optimal_split: mapped partition is inconsistent");
  }
  d.delay_us = training_delay(p, d.partition, n);

  if (n.weight_mode == WeightMode::consistent && d.cut_value_us != d.delay_us)
    throw Error("optimal_split: cut value " + std::to_string(d.cut_value_us) +
                " us does not equal the partition delay " + std::to_string(d.delay_us) +
                " us in consistent mode");
  return d;
}

SplitDecision brute_force_linear(const ModelProfile& p, const NetParams& n) {
  if (!p.is_chain())
    throw Error("brute_force_linear: profile is not a chain");

  SplitDecision best;
  best.method = SplitMethod::linear_bruteforce;
  bool have = false;
  Partition prefix;  // grows along the chain; smallest device set first
  const auto& order = p.topo_order();
  for (std::size_t len = 0; len <= order.size(); ++len) {
    if (len > 0) prefix.device.insert(order[len - 1]);
    const Micros delay = training_delay(p, prefix, n);
    if (!have || delay < best.delay_us) {
      have = true;
      best.partition = prefix;
      best.delay_us = delay;
      best.cut_value_us = delay;
    }
  }
  return best;
}

SplitDecision optimal_split(const ModelProfile& p, const NetParams& n) {
  if (p.is_chain()) return brute_force_linear(p, n);
  return mincut_split(p, n, build_split_dag(p, n), SplitMethod::dag_mincut);
}

}  // namespace splitflow
