#include "splitflow/maxflow.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace splitflow {

FlowNetwork::FlowNetwork(int num_vertices, int source, int sink)
    : adj_(num_vertices), source_(source), sink_(sink) {
  if (source < 0 || sink < 0 || source >= num_vertices || sink >= num_vertices)
    throw Error("flow network: source/sink out of range");
  if (source == sink) throw Error("flow network: source equals sink");
}

int FlowNetwork::add_arc(int from, int to, std::int64_t capacity) {
  if (from < 0 || to < 0 || from >= num_vertices() || to >= num_vertices())
    throw Error("flow network: arc endpoint out of range");
  if (capacity < 0) throw Error("flow network: negative arc capacity");
  const int id = static_cast<int>(edges_.size());
  edges_.push_back({to, capacity});
  edges_.push_back({from, 0});
  adj_[from].push_back(id);
  adj_[to].push_back(id + 1);
  solved_ = false;
  return id;
}

bool FlowNetwork::bfs_levels() {
  level_.assign(adj_.size(), -1);
  std::deque<int> queue{source_};
  level_[source_] = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int id : adj_[v]) {
      const Edge& e = edges_[id];
      if (e.cap > 0 && level_[e.to] < 0) {
        level_[e.to] = level_[v] + 1;
        queue.push_back(e.to);
      }
    }
  }
  return level_[sink_] >= 0;
}

std::int64_t FlowNetwork::dfs_augment(int v, std::int64_t limit) {
  if (v == sink_) return limit;
  for (int& i = iter_[v]; i < static_cast<int>(adj_[v].size()); ++i) {
    const int id = adj_[v][i];
    Edge& e = edges_[id];
    if (e.cap > 0 && level_[e.to] == level_[v] + 1) {
      const std::int64_t pushed = dfs_augment(e.to, std::min(limit, e.cap));
      if (pushed > 0) {
        e.cap -= pushed;
        edges_[id ^ 1].cap += pushed;
        return pushed;
      }
    }
  }
  level_[v] = -1;
  return 0;
}

std::int64_t FlowNetwork::max_flow() {
  if (solved_) return flow_;
  while (bfs_levels()) {
    iter_.assign(adj_.size(), 0);
    while (std::int64_t pushed =
               dfs_augment(source_, std::numeric_limits<std::int64_t>::max())) {
      flow_ += pushed;
      if (flow_ >= kInfUs)
        throw Error("max_flow: flow reached the pinning sentinel (unpinned network)");
    }
  }
  solved_ = true;
  return flow_;
}

FlowNetwork::Cut FlowNetwork::min_cut() {
  Cut cut;
  cut.value = max_flow();
  cut.source_side.assign(adj_.size(), false);
  std::deque<int> queue{source_};
  cut.source_side[source_] = true;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int id : adj_[v]) {
      const Edge& e = edges_[id];
      if (e.cap > 0 && !cut.source_side[e.to]) {
        cut.source_side[e.to] = true;
        queue.push_back(e.to);
      }
    }
  }

  std::int64_t crossing = 0;
  for (int id = 0; id < static_cast<int>(edges_.size()); id += 2) {
    const int from = edges_[id ^ 1].to;
    const int to = edges_[id].to;
    if (cut.source_side[from] && !cut.source_side[to]) {
      cut.cut_arcs.push_back(id);
      crossing += arc_capacity(id);
    }
  }
  if (crossing != cut.value)
    throw Error("min_cut: crossing capacities do not match the flow value");
  return cut;
}

std::int64_t FlowNetwork::arc_capacity(int id) const {
  if (id < 0 || id >= static_cast<int>(edges_.size()) || (id & 1))
    throw Error("flow network: bad arc id");
  return edges_[id].cap + edges_[id ^ 1].cap;
}

}  // namespace splitflow
