#include "splitflow/blockwise.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "splitflow/maxflow.hpp"

namespace splitflow {

namespace {

// Integer view of a profile shared across the per-block analyses: layer and
// input positions, adjacency, activation sizes, and descendant bitsets.
struct ProfileIndex {
  const ModelProfile& profile;
  int n = 0;         // layers plus the input pseudo-layer
  int input_pos = 0;
  std::unordered_map<std::string, int> pos;
  std::vector<const std::string*> id_of;
  std::vector<std::vector<int>> children;
  std::vector<std::vector<int>> parents;
  std::vector<Bytes> a_bytes;
  std::vector<std::vector<std::uint64_t>> desc;

  explicit ProfileIndex(const ModelProfile& p) : profile(p) {
    const int layers = static_cast<int>(p.layer_count());
    n = layers + 1;
    input_pos = layers;
    id_of.resize(n);
    children.resize(n);
    parents.resize(n);
    a_bytes.resize(n);
    static const std::string kInput = kInputId;
    id_of[input_pos] = &kInput;
    a_bytes[input_pos] = p.input_bytes;
    for (int i = 0; i < layers; ++i) {
      pos.emplace(p.layers[i].id, i);
      id_of[i] = &p.layers[i].id;
      a_bytes[i] = p.layers[i].output_bytes;
    }
    pos.emplace(kInputId, input_pos);
    for (const auto& [u, v] : p.edges) {
      const int a = pos.at(u), b = pos.at(v);
      children[a].push_back(b);
      parents[b].push_back(a);
    }
    for (const auto& c : p.input_consumers()) {
      const int b = pos.at(c);
      children[input_pos].push_back(b);
      parents[b].push_back(input_pos);
    }

    const int words = (n + 63) / 64;
    desc.assign(n, std::vector<std::uint64_t>(words, 0));
    std::vector<int> order;
    order.reserve(n);
    for (const auto& id : p.topo_order()) order.push_back(pos.at(id));
    order.push_back(input_pos);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      auto& bits = desc[*it];
      for (int c : children[*it]) {
        bits[c >> 6] |= std::uint64_t{1} << (c & 63);
        for (int w = 0; w < words; ++w) bits[w] |= desc[c][w];
      }
    }
  }

  bool descends(int from, int v) const {
    return (desc[from][v >> 6] >> (v & 63)) & 1;
  }
};

// Outcome of classifying one block against its surroundings, integer form.
struct BlockClass {
  int output = -1;
  bool external_sound = true;
  Bytes dedicated_in = 0;
  std::vector<int> dedicated_parents;
  std::vector<int> bypass_parents;
  std::vector<std::tuple<int, int, Bytes>> source_arcs;  // parent -> member
  std::vector<std::tuple<int, int, Bytes>> local_arcs;   // member -> member
};

BlockClass classify_block(const ProfileIndex& idx, const BlockAnnotation& b) {
  if (b.members.empty()) throw Error("block '" + b.block_id + "': no members");
  BlockClass out;
  std::vector<int> members;
  members.reserve(b.members.size());
  const int words = (idx.n + 63) / 64;
  std::vector<std::uint64_t> member_bits(words, 0);
  for (const auto& m : b.members) {
    auto it = idx.pos.find(m);
    if (it == idx.pos.end() || it->second == idx.input_pos)
      throw Error("block '" + b.block_id + "': unknown member '" + m + "'");
    members.push_back(it->second);
    member_bits[it->second >> 6] |= std::uint64_t{1} << (it->second & 63);
  }
  auto is_member = [&](int v) {
    return (member_bits[v >> 6] >> (v & 63)) & 1;
  };

  for (int m : members) {
    bool is_output = idx.children[m].empty();
    for (int c : idx.children[m]) {
      if (is_member(c))
        out.local_arcs.emplace_back(m, c, idx.a_bytes[m]);
      else
        is_output = true;
    }
    if (!is_output) continue;
    if (out.output >= 0)
      throw Error("block '" + b.block_id + "': multiple outputs ('" +
                  *idx.id_of[out.output] + "' and '" + *idx.id_of[m] +
                  "') are unsupported");
    out.output = m;
  }
  if (out.output < 0)
    throw Error("block '" + b.block_id + "': no output member found");

  // External parents, classified as dedicated or bypassing. A bypassing
  // parent is safe when one of its outside children sits downstream of the
  // block output: a cut through the interior then already pays that
  // parent's transfer, so its cost cancels out of the comparison.
  std::vector<int> externals;
  std::unordered_map<int, std::vector<int>> fed_by;
  for (int m : members)
    for (int q : idx.parents[m]) {
      if (is_member(q)) continue;
      auto [it, fresh] = fed_by.emplace(q, std::vector<int>{});
      if (fresh) externals.push_back(q);
      it->second.push_back(m);
    }

  for (int q : externals) {
    bool bypasses = false;
    bool anchored = false;
    for (int c : idx.children[q]) {
      if (is_member(c)) continue;
      bypasses = true;
      if (idx.descends(out.output, c)) {
        anchored = true;
        break;
      }
    }
    const Bytes weight = bypasses ? 0 : idx.a_bytes[q];
    for (int m : fed_by.at(q)) out.source_arcs.emplace_back(q, m, weight);
    if (bypasses) {
      out.bypass_parents.push_back(q);
      if (!anchored) out.external_sound = false;
    } else {
      out.dedicated_parents.push_back(q);
      out.dedicated_in += idx.a_bytes[q];
    }
  }
  return out;
}

BlockView materialize(const ProfileIndex& idx, const BlockAnnotation& b,
                      const BlockClass& cls) {
  BlockView view;
  view.block_id = b.block_id;
  view.input_id = b.input_layer_id;
  view.members = b.members;
  view.a_in_bytes = idx.profile.output_bytes_of(b.input_layer_id);
  view.output_id = *idx.id_of[cls.output];
  view.dedicated_in_bytes = cls.dedicated_in;
  view.external_sound = cls.external_sound;
  for (int q : cls.dedicated_parents) view.dedicated_parents.push_back(*idx.id_of[q]);
  for (int q : cls.bypass_parents) view.bypass_parents.push_back(*idx.id_of[q]);
  for (const auto& [q, m, w] : cls.source_arcs)
    view.source_arcs.emplace_back(*idx.id_of[q], *idx.id_of[m], w);
  for (const auto& [u, v, w] : cls.local_arcs)
    view.local_arcs.emplace_back(*idx.id_of[u], *idx.id_of[v], w);
  return view;
}

void build_cut_graph(BlockView& b) {
  SplitDag& g = b.graph;
  g.source = g.add_vertex("<in>", VertexKind::source);
  g.sink = g.add_vertex("<out>", VertexKind::sink);
  for (const auto& q : b.dedicated_parents) g.add_vertex(q, VertexKind::layer);
  for (const auto& q : b.bypass_parents) g.add_vertex(q, VertexKind::layer);
  for (const auto& m : b.members) g.add_vertex(m, VertexKind::layer);

  for (const auto& q : b.dedicated_parents)
    g.add_arc(g.source, g.vertex(q), kInfUs, ArcKind::exec_server);
  for (const auto& q : b.bypass_parents)
    g.add_arc(g.source, g.vertex(q), kInfUs, ArcKind::exec_server);
  for (const auto& [from, to, w] : b.source_arcs)
    g.add_arc(g.vertex(from), g.vertex(to), w, ArcKind::propagation);
  for (const auto& [from, to, w] : b.local_arcs)
    g.add_arc(g.vertex(from), g.vertex(to), w, ArcKind::propagation);
  g.add_arc(g.vertex(b.output_id), g.sink, kInfUs, ArcKind::exec_device);
  b.graph_built = true;
}

}  // namespace

BlockView make_block_view(const ModelProfile& p, const BlockAnnotation& b) {
  const ProfileIndex idx(p);
  return materialize(idx, b, classify_block(idx, b));
}

Bytes block_min_cut(BlockView& b) {
  if (b.cut_computed) return b.a_min_bytes;
  if (!b.graph_built) build_cut_graph(b);
  SplitDag g = restructure(b.graph);
  FlowNetwork net = to_flow_network(g);
  const FlowNetwork::Cut cut = net.min_cut();

  b.a_min_bytes = cut.value;
  b.min_cut_device_members.clear();
  auto resolved = [&](int v) {
    const int aux = g.vertices[v].proxied_by;
    return aux >= 0 ? cut.source_side[aux] : cut.source_side[v];
  };
  const std::unordered_set<std::string> members(b.members.begin(), b.members.end());
  for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) {
    const auto& vert = g.vertices[v];
    if (vert.kind != VertexKind::layer || !members.count(vert.id)) continue;
    if (resolved(v)) b.min_cut_device_members.push_back(vert.id);
  }
  b.cut_computed = true;
  return b.a_min_bytes;
}

bool intra_block_test(const BlockView& b) {
  if (!b.cut_computed)
    throw Error("intra_block_test: block_min_cut has not been computed");
  return b.external_sound && b.a_min_bytes >= b.dedicated_in_bytes;
}

namespace {

// Every cut costs at least zero bytes, so a sound block with no dedicated
// input mass passes without running the flow.
bool block_passes(const ProfileIndex& idx, const BlockAnnotation& b,
                  const BlockClass& cls) {
  if (!cls.external_sound) return false;
  if (cls.dedicated_in == 0) return true;
  BlockView view = materialize(idx, b, cls);
  block_min_cut(view);
  return intra_block_test(view);
}

// One-pass fold of several blocks into single vertices.
SplitDag fold_blocks(const SplitDag& g,
                     const std::vector<const BlockAnnotation*>& blocks) {
  if (g.restructured)
    throw Error("abstract_blocks: abstraction runs before restructuring");
  // Block ownership by vertex position, so the arc sweep stays integer-only.
  std::vector<int> owner(g.vertices.size(), -1);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (const auto& m : blocks[i]->members) {
      auto it = g.index.find(m);
      if (it == g.index.end())
        throw Error("abstract_blocks: member '" + m + "' is not a graph vertex");
      owner[it->second] = static_cast<int>(i);
    }
  }

  SplitDag out;
  out.block_members = g.block_members;
  out.vertices.reserve(g.vertices.size());
  std::vector<int> remap(g.vertices.size(), -1);
  for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v)
    if (owner[v] < 0)
      remap[v] = out.add_vertex(g.vertices[v].id, g.vertices[v].kind);
  std::vector<int> block_vertex(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    block_vertex[i] = out.add_vertex(blocks[i]->block_id, VertexKind::block);
    out.block_members[blocks[i]->block_id] = blocks[i]->members;
  }
  for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v)
    if (remap[v] < 0) remap[v] = block_vertex[owner[v]];
  out.source = remap[g.source];
  out.sink = remap[g.sink];

  auto key = [](int from, int to) {
    return (std::uint64_t(std::uint32_t(from)) << 32) | std::uint32_t(to);
  };
  std::vector<Micros> exec_device(blocks.size(), 0), exec_server(blocks.size(), 0);
  // Arcs into a folded block, bucketed by original target: the bucket sums
  // accumulate member sources, and all buckets of one (from, block) pair
  // must agree so the single kept weight is well defined.
  std::unordered_map<std::uint64_t, Micros> into_block;    // (from, orig to)
  std::unordered_map<std::uint64_t, Micros> out_of_block;  // (block, to)
  out.arcs.reserve(g.arcs.size());
  for (const auto& a : g.arcs) {
    const int from_block = owner[a.from];
    const int to_block = owner[a.to];
    if (from_block < 0 && to_block < 0) {
      out.add_arc(remap[a.from], remap[a.to], a.cap_us, a.kind);
    } else if (from_block >= 0 && from_block == to_block) {
      continue;  // intra-block arc
    } else if (from_block >= 0 && a.kind == ArcKind::exec_device) {
      exec_device[from_block] = checked_add_us(exec_device[from_block], a.cap_us);
    } else if (to_block >= 0 && a.kind == ArcKind::exec_server) {
      exec_server[to_block] = checked_add_us(exec_server[to_block], a.cap_us);
    } else if (to_block >= 0) {
      auto [it, fresh] = into_block.emplace(key(remap[a.from], a.to), a.cap_us);
      if (!fresh) it->second = checked_add_us(it->second, a.cap_us);
    } else {
      auto [it, fresh] =
          out_of_block.emplace(key(remap[a.from], remap[a.to]), a.cap_us);
      if (!fresh) it->second = checked_add_us(it->second, a.cap_us);
    }
  }

  for (std::size_t i = 0; i < blocks.size(); ++i) {
    out.add_arc(block_vertex[i], out.sink, exec_device[i], ArcKind::exec_device);
    out.add_arc(out.source, block_vertex[i], exec_server[i], ArcKind::exec_server);
  }
  // Collapse the per-target buckets: one incoming arc per (from, block).
  std::unordered_map<std::uint64_t, Micros> collapsed;
  for (const auto& [k, weight] : into_block) {
    const int from = int(k >> 32);
    const int to = remap[int(k & 0xFFFFFFFF)];
    auto [it, fresh] = collapsed.emplace(key(from, to), weight);
    if (!fresh && it->second != weight)
      throw Error("abstract_blocks: parent '" + out.vertices[from].id +
                  "' feeds block '" + out.vertices[to].id +
                  "' with unequal arc weights");
  }
  std::vector<std::pair<std::uint64_t, Micros>> ordered;
  auto emit_sorted = [&](std::unordered_map<std::uint64_t, Micros>& bag) {
    ordered.assign(bag.begin(), bag.end());
    std::sort(ordered.begin(), ordered.end());
    for (const auto& [k, weight] : ordered)
      out.add_arc(int(k >> 32), int(k & 0xFFFFFFFF), weight, ArcKind::propagation);
  };
  emit_sorted(collapsed);
  emit_sorted(out_of_block);
  return out;
}

const BlockAnnotation& find_block(const ModelProfile& p, const std::string& id) {
  for (const auto& b : p.blocks)
    if (b.block_id == id) return b;
  throw Error("abstract_blocks: unknown block '" + id + "'");
}

}  // namespace

SplitDag abstract_blocks(const SplitDag& g, const ModelProfile& p,
                         const std::vector<std::string>& block_ids) {
  const ProfileIndex idx(p);
  std::vector<const BlockAnnotation*> blocks;
  for (const auto& id : block_ids) {
    const BlockAnnotation& b = find_block(p, id);
    BlockView view = materialize(idx, b, classify_block(idx, b));
    block_min_cut(view);
    if (!intra_block_test(view))
      throw Error("abstract_blocks: block '" + id + "' failed the intra-block test");
    blocks.push_back(&b);
  }
  return fold_blocks(g, blocks);
}

SplitDag abstract_blocks(const SplitDag& g, const ModelProfile& p) {
  std::vector<std::string> ids;
  for (const auto& b : p.blocks) ids.push_back(b.block_id);
  return abstract_blocks(g, p, ids);
}

SplitDecision blockwise_split(const ModelProfile& p, const NetParams& n,
                              const BlockwiseOptions& opts) {
  std::vector<const BlockAnnotation*> passing;
  bool all_pass = true;
  if (!p.blocks.empty()) {
    const ProfileIndex idx(p);
    for (const auto& b : p.blocks) {
      if (block_passes(idx, b, classify_block(idx, b)))
        passing.push_back(&b);
      else
        all_pass = false;
    }
  }
  if (opts.strict_all_or_nothing && !all_pass) passing.clear();

  SplitDag g = build_split_dag(p, n);
  if (!passing.empty()) g = fold_blocks(g, passing);
  return mincut_split(p, n, std::move(g), SplitMethod::blockwise);
}

}  // namespace splitflow
