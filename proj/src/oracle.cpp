#include "splitflow/oracle.hpp"

#include <algorithm>

namespace splitflow {

namespace {

struct TopoView {
  std::vector<std::string> order;
  std::vector<std::vector<int>> parents;  // positions in order
};

TopoView make_view(const ModelProfile& p) {
  TopoView view;
  view.order = p.topo_order();
  std::unordered_map<std::string, int> pos;
  for (int i = 0; i < static_cast<int>(view.order.size()); ++i)
    pos[view.order[i]] = i;
  view.parents.resize(view.order.size());
  for (int i = 0; i < static_cast<int>(view.order.size()); ++i)
    for (const auto& par : p.parents(view.order[i]))
      view.parents[i].push_back(pos.at(par));
  return view;
}

// Device sets are exactly the ancestor-closed subsets: walk the topological
// order and allow "in" only when every parent is already in.
void visit_downsets(const TopoView& view, std::vector<bool>& in, std::size_t i,
                    std::size_t* budget,
                    const std::function<void(const std::vector<bool>&)>& visit) {
  if (budget && *budget == 0) return;
  if (i == view.order.size()) {
    if (budget) --*budget;
    visit(in);
    return;
  }
  in[i] = false;
  visit_downsets(view, in, i + 1, budget, visit);
  for (int par : view.parents[i])
    if (!in[par]) return;
  in[i] = true;
  visit_downsets(view, in, i + 1, budget, visit);
  in[i] = false;
}

Partition to_partition(const TopoView& view, const std::vector<bool>& in) {
  Partition c;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in[i]) c.device.insert(view.order[i]);
  return c;
}

}  // namespace

void enumerate_partitions(const ModelProfile& p,
                          const std::function<void(const Partition&)>& visit) {
  if (p.layer_count() > kMaxOracleLayers)
    throw Error("enumerate_partitions: instance exceeds " +
                std::to_string(kMaxOracleLayers) + " layers");
  const TopoView view = make_view(p);
  std::vector<bool> in(view.order.size(), false);
  visit_downsets(view, in, 0, nullptr,
                 [&](const std::vector<bool>& bits) { visit(to_partition(view, bits)); });
}

std::size_t count_partitions(const ModelProfile& p) {
  std::size_t n = 0;
  enumerate_partitions(p, [&](const Partition&) { ++n; });
  return n;
}

std::vector<Partition> consistent_partitions(const ModelProfile& p,
                                             std::size_t max_partitions) {
  const TopoView view = make_view(p);
  std::vector<Partition> out;
  std::vector<bool> in(view.order.size(), false);
  std::size_t budget = max_partitions;
  visit_downsets(view, in, 0, &budget, [&](const std::vector<bool>& bits) {
    out.push_back(to_partition(view, bits));
  });
  if (budget == 0)
    throw Error("consistent_partitions: candidate count exceeds " +
                std::to_string(max_partitions));
  return out;
}

SplitDecision oracle_optimal(const ModelProfile& p, const NetParams& n) {
  SplitDecision best;
  best.method = SplitMethod::oracle;
  bool have = false;
  enumerate_partitions(p, [&](const Partition& c) {
    const Micros delay = training_delay(p, c, n);
    if (!have || delay < best.delay_us ||
        (delay == best.delay_us &&
         (c.device.size() < best.partition.device.size() ||
          (c.device.size() == best.partition.device.size() &&
           c.device < best.partition.device)))) {
      have = true;
      best.partition = c;
      best.delay_us = delay;
      best.cut_value_us = delay;
    }
  });
  return best;
}

}  // namespace splitflow
