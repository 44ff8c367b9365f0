#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "splitflow/delay.hpp"
#include "splitflow/profile.hpp"
#include "splitflow/types.hpp"

namespace splitflow {

enum class VertexKind { source, sink, layer, auxiliary, block };
enum class ArcKind { exec_device, exec_server, propagation, aux_link };

struct DagVertex {
  std::string id;
  VertexKind kind = VertexKind::layer;
  int proxy_for = -1;   // auxiliary: index of the vertex it fronts
  int proxied_by = -1;  // layer/block: index of its auxiliary, if any
};

struct DagArc {
  int from = -1;
  int to = -1;
  Micros cap_us = 0;
  ArcKind kind = ArcKind::propagation;
};

// Flow network over {source D, sink S, layer vertices, auxiliary vertices,
// block vertices} whose minimum s-t cut encodes the optimal split.
struct SplitDag {
  std::vector<DagVertex> vertices;
  std::vector<DagArc> arcs;
  int source = 0;
  int sink = 1;
  bool restructured = false;
  std::unordered_map<std::string, int> index;  // vertex id -> position
  std::unordered_map<std::string, std::vector<std::string>> block_members;

  int vertex(const std::string& id) const;
  int add_vertex(std::string id, VertexKind kind);
  void add_arc(int from, int to, Micros cap_us, ArcKind kind);
};

// Builds the weighted DAG for a validated profile. Every layer carries a
// device-execution arc to the sink and a server-execution arc from the
// source; every data edge carries the round-trip activation cost per local
// iteration. The input pseudo-layer is pinned device-side by an
// infinite-capacity source arc (omitted entirely when n.input_cost is off).
//
// Weight placement depends on n.weight_mode:
//   consistent    — both parameter-transfer terms ride the device arc, so a
//                   cut value equals the training delay of the partition;
//   paper_literal — the download term rides the server arc instead, kept for
//                   comparison (cut values then deviate from delays whenever
//                   the two sides hold different parameter masses).
SplitDag build_split_dag(const ModelProfile& p, const NetParams& n);

// Layer/block vertices with two or more outgoing propagation arcs whose
// smashed data a cut could otherwise count several times. Vertices already
// fronted by an auxiliary are excluded.
std::vector<int> multi_child_parents(const SplitDag& g);

// Adds an auxiliary vertex for each multi-child parent: incoming arcs are
// re-targeted to the auxiliary, the execution arc to the sink moves with
// them, and a single arc from the auxiliary to the parent carries one
// propagation weight. Requires the parent's outgoing propagation weights to
// agree. Idempotent: a second pass finds nothing new to treat.
SplitDag restructure(SplitDag g);

// Graphviz dump for inspection; vertex labels carry provenance and arc
// labels carry capacities.
std::string to_dot(const SplitDag& g);

class FlowNetwork;

// Flow-network image of the graph. Besides the weighted arcs this adds an
// infinite reverse arc for every propagation and auxiliary link: a finite
// cut can then never place a layer on the device side while a vertex it
// depends on sits on the server side. Without these feasibility arcs the
// minimum cut can drop below every realizable partition's delay, since the
// delay model prices no server-to-device activation transfer.
FlowNetwork to_flow_network(const SplitDag& g);

}  // namespace splitflow
