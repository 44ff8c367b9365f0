#pragma once

#include <cstdint>
#include <vector>

#include "splitflow/types.hpp"

namespace splitflow {

// Exact integer max-flow via Dinic's algorithm: repeated BFS level graphs
// with blocking-flow DFS. Deterministic given the arc insertion order.
class FlowNetwork {
 public:
  FlowNetwork(int num_vertices, int source, int sink);

  // Adds a directed arc and its zero-capacity residual twin; returns the
  // arc id used by min_cut() and arc_capacity().
  int add_arc(int from, int to, std::int64_t capacity);

  // Runs (or returns the cached) maximum flow. Throws if the flow reaches
  // the pinning sentinel, which means the network was built unpinned.
  std::int64_t max_flow();

  struct Cut {
    std::vector<bool> source_side;  // residual-reachable vertices
    std::vector<int> cut_arcs;      // saturated forward arcs crossing the cut
    std::int64_t value = 0;
  };

  // Minimum s-t cut from residual reachability after max_flow(). The
  // returned source side is the minimal one among all minimum cuts, which
  // fixes tie-breaking. Asserts that the crossing capacities sum to the
  // flow value.
  Cut min_cut();

  std::int64_t arc_capacity(int id) const;  // original capacity
  int num_vertices() const { return static_cast<int>(adj_.size()); }

 private:
  struct Edge {
    int to;
    std::int64_t cap;  // residual capacity
  };

  bool bfs_levels();
  std::int64_t dfs_augment(int v, std::int64_t limit);

  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> level_;
  std::vector<int> iter_;
  int source_;
  int sink_;
  bool solved_ = false;
  std::int64_t flow_ = 0;
};

}  // namespace splitflow
