#include "splitflow/split_dag.hpp"

#include <algorithm>
#include <sstream>

#include "splitflow/maxflow.hpp"

namespace splitflow {

int SplitDag::vertex(const std::string& id) const {
  auto it = index.find(id);
  if (it == index.end()) throw Error("split dag: unknown vertex '" + id + "'");
  return it->second;
}

int SplitDag::add_vertex(std::string id, VertexKind kind) {
  const int pos = static_cast<int>(vertices.size());
  if (!index.emplace(id, pos).second)
    throw Error("split dag: duplicate vertex '" + id + "'");
  vertices.push_back({std::move(id), kind, -1, -1});
  return pos;
}

void SplitDag::add_arc(int from, int to, Micros cap_us, ArcKind kind) {
  arcs.push_back({from, to, cap_us, kind});
}

namespace {

Micros propagation_weight(Bytes a, const NetParams& n) {
  const Micros round_trip =
      checked_add_us(transfer_us(a, n.rate_up_Bps), transfer_us(a, n.rate_down_Bps));
  return checked_mul_us(round_trip, n.local_iters);
}

}  // namespace

SplitDag build_split_dag(const ModelProfile& p, const NetParams& n) {
  if (n.rate_up_Bps <= 0 || n.rate_down_Bps <= 0)
    throw Error("build_split_dag: rates must be positive");
  if (n.local_iters < 1) throw Error("build_split_dag: local_iters must be >= 1");

  SplitDag g;
  g.source = g.add_vertex("D", VertexKind::source);
  g.sink = g.add_vertex("S", VertexKind::sink);

  if (n.input_cost) g.add_vertex(kInputId, VertexKind::layer);
  for (const auto& l : p.layers) g.add_vertex(l.id, VertexKind::layer);

  if (n.input_cost) {
    const int in = g.vertex(kInputId);
    g.add_arc(g.source, in, kInfUs, ArcKind::exec_server);  // pinned device-side
    g.add_arc(in, g.sink, 0, ArcKind::exec_device);
  }

  for (const auto& l : p.layers) {
    const int v = g.vertex(l.id);
    const Micros param_up = transfer_us(l.param_bytes, n.rate_up_Bps);
    const Micros param_down = transfer_us(l.param_bytes, n.rate_down_Bps);
    const Micros compute_device = checked_mul_us(l.xi_device_us, n.local_iters);
    const Micros compute_server = checked_mul_us(l.xi_server_us, n.local_iters);
    Micros device_arc;  // (v, S): crossed when v runs on the device
    Micros server_arc;  // (D, v): crossed when v runs on the server
    if (n.weight_mode == WeightMode::consistent) {
      device_arc = checked_add_us(compute_device, checked_add_us(param_up, param_down));
      server_arc = compute_server;
    } else {
      device_arc = checked_add_us(compute_device, param_up);
      server_arc = checked_add_us(compute_server, param_down);
    }
    g.add_arc(v, g.sink, device_arc, ArcKind::exec_device);
    g.add_arc(g.source, v, server_arc, ArcKind::exec_server);
  }

  if (n.input_cost) {
    const int in = g.vertex(kInputId);
    const Micros w = propagation_weight(p.input_bytes, n);
    for (const auto& child : p.input_consumers())
      g.add_arc(in, g.vertex(child), w, ArcKind::propagation);
  }
  for (const auto& [u, v] : p.edges) {
    const Micros w = propagation_weight(p.layer(u).output_bytes, n);
    g.add_arc(g.vertex(u), g.vertex(v), w, ArcKind::propagation);
  }
  return g;
}

std::vector<int> multi_child_parents(const SplitDag& g) {
  std::vector<int> fanout(g.vertices.size(), 0);
  for (const auto& a : g.arcs)
    if (a.kind == ArcKind::propagation) fanout[a.from]++;
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) {
    const auto& vert = g.vertices[v];
    if (vert.kind != VertexKind::layer && vert.kind != VertexKind::block) continue;
    if (vert.proxied_by >= 0) continue;
    if (fanout[v] >= 2) out.push_back(v);
  }
  return out;
}

SplitDag restructure(SplitDag g) {
  const std::vector<int> parents = multi_child_parents(g);
  std::vector<int> aux_of(g.vertices.size(), -1);
  std::vector<Micros> link_weight(g.vertices.size(), -1);
  for (int vp : parents) {
    Micros weight = -1;
    for (const auto& a : g.arcs) {
      if (a.from != vp || a.kind != ArcKind::propagation) continue;
      if (weight < 0) {
        weight = a.cap_us;
      } else if (weight != a.cap_us) {
        throw Error("restructure: parent '" + g.vertices[vp].id +
                    "' has heterogeneous outgoing propagation weights");
      }
    }
    std::string aux_id = g.vertices[vp].id + "'";
    while (g.index.count(aux_id)) aux_id += "'";
    const int aux = g.add_vertex(aux_id, VertexKind::auxiliary);
    g.vertices[aux].proxy_for = vp;
    g.vertices[vp].proxied_by = aux;
    aux_of[vp] = aux;
    link_weight[vp] = weight;
  }
  for (auto& a : g.arcs) {
    if (a.to < static_cast<int>(aux_of.size()) && aux_of[a.to] >= 0)
      a.to = aux_of[a.to];  // incoming arcs follow the auxiliary
    if (a.from < static_cast<int>(aux_of.size()) && aux_of[a.from] >= 0 &&
        a.kind == ArcKind::exec_device)
      a.from = aux_of[a.from];  // so does the execution arc to the sink
  }
  for (int vp : parents)
    g.add_arc(aux_of[vp], vp, link_weight[vp], ArcKind::aux_link);
  g.restructured = true;
  return g;
}

FlowNetwork to_flow_network(const SplitDag& g) {
  FlowNetwork net(static_cast<int>(g.vertices.size()), g.source, g.sink);
  for (const auto& a : g.arcs) net.add_arc(a.from, a.to, a.cap_us);
  for (const auto& a : g.arcs)
    if (a.kind == ArcKind::propagation || a.kind == ArcKind::aux_link)
      net.add_arc(a.to, a.from, kInfUs);
  return net;
}

std::string to_dot(const SplitDag& g) {
  std::ostringstream os;
  os << "digraph split_dag {\n  rankdir=LR;\n";
  for (const auto& v : g.vertices) {
    os << "  \"" << v.id << "\" [label=\"" << v.id;
    if (v.kind == VertexKind::auxiliary)
      os << "\\nproxy for " << g.vertices[v.proxy_for].id;
    if (v.kind == VertexKind::block) {
      os << "\\nblock of";
      auto it = g.block_members.find(v.id);
      if (it != g.block_members.end())
        for (const auto& m : it->second) os << " " << m;
    }
    os << "\"";
    if (v.kind == VertexKind::source || v.kind == VertexKind::sink)
      os << " shape=doublecircle";
    os << "];\n";
  }
  for (const auto& a : g.arcs) {
    os << "  \"" << g.vertices[a.from].id << "\" -> \"" << g.vertices[a.to].id
       << "\" [label=\"";
    if (a.cap_us >= kInfUs)
      os << "INF";
    else
      os << a.cap_us;
    os << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace splitflow
