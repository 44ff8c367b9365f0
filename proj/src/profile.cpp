#include "splitflow/profile.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "json.hpp"

namespace splitflow {

namespace {

const std::vector<std::string> kNoIds;

}  // namespace

void ModelProfile::finalize() {
  index_.clear();
  children_.clear();
  parents_.clear();
  input_consumers_.clear();
  topo_order_.clear();

  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string& id = layers[i].id;
    if (id.empty()) throw Error("profile: empty layer id");
    if (id == kInputId)
      throw Error("profile: layer id 'input' is reserved for the input pseudo-layer");
    if (!index_.emplace(id, i).second)
      throw Error("profile: duplicate layer id '" + id + "'");
  }

  std::set<std::pair<std::string, std::string>> seen_edges;
  for (const auto& [u, v] : edges) {
    if (!contains(u) || !contains(v))
      throw Error("profile: edge (" + u + "," + v + ") references an unknown layer id");
    if (u == v) throw Error("profile: self-edge on layer '" + u + "'");
    if (!seen_edges.emplace(u, v).second)
      throw Error("profile: duplicate edge (" + u + "," + v + ")");
    children_[u].push_back(v);
    parents_[v].push_back(u);
  }
  std::set<std::string> feeds;
  for (const auto& id : input_feeds) {
    if (!contains(id))
      throw Error("profile: input feed references an unknown layer id '" + id + "'");
    if (!feeds.insert(id).second)
      throw Error("profile: duplicate input feed '" + id + "'");
  }
  for (const auto& id : input_feeds) input_consumers_.push_back(id);
  for (const auto& l : layers)
    if (parents_.find(l.id) == parents_.end() && feeds.find(l.id) == feeds.end())
      input_consumers_.push_back(l.id);

  for (const auto& b : blocks) {
    if (b.block_id.empty()) throw Error("profile: empty block id");
    if (contains(b.block_id) || b.block_id == kInputId)
      throw Error("profile: block id '" + b.block_id + "' collides with a layer id");
    for (const auto& m : b.members)
      if (!contains(m))
        throw Error("profile: block '" + b.block_id + "' lists unknown member '" + m + "'");
    if (!b.input_layer_id.empty() && b.input_layer_id != kInputId &&
        !contains(b.input_layer_id))
      throw Error("profile: block '" + b.block_id + "' names unknown input layer '" +
                  b.input_layer_id + "'");
  }

  // Kahn's algorithm; leftover vertices mean a cycle.
  std::unordered_map<std::string, int> indeg;
  for (const auto& l : layers) indeg[l.id] = 0;
  for (const auto& [u, v] : edges) indeg[v]++;
  std::deque<std::string> ready;
  for (const auto& l : layers)
    if (indeg[l.id] == 0) ready.push_back(l.id);
  while (!ready.empty()) {
    std::string u = ready.front();
    ready.pop_front();
    topo_order_.push_back(u);
    for (const auto& v : children(u))
      if (--indeg[v] == 0) ready.push_back(v);
  }
  if (topo_order_.size() != layers.size())
    throw Error("profile: cycle detected in the layer dependency edges");

  is_chain_ = input_consumers_.size() <= 1;
  for (const auto& l : layers) {
    if (children(l.id).size() > 1 || parents(l.id).size() > 1) is_chain_ = false;
  }

  finalized_ = true;
}

void ModelProfile::require_finalized() const {
  if (!finalized_) throw Error("profile: finalize() has not been called");
}

bool ModelProfile::contains(const std::string& id) const {
  return index_.find(id) != index_.end();
}

const LayerProfile& ModelProfile::layer(const std::string& id) const {
  require_finalized();
  auto it = index_.find(id);
  if (it == index_.end()) throw Error("profile: unknown layer id '" + id + "'");
  return layers[it->second];
}

const std::vector<std::string>& ModelProfile::children(const std::string& id) const {
  auto it = children_.find(id);
  return it == children_.end() ? kNoIds : it->second;
}

const std::vector<std::string>& ModelProfile::parents(const std::string& id) const {
  auto it = parents_.find(id);
  return it == parents_.end() ? kNoIds : it->second;
}

Bytes ModelProfile::output_bytes_of(const std::string& id) const {
  if (id == kInputId) return input_bytes;
  return layer(id).output_bytes;
}

namespace {

std::int64_t require_int(const nlohmann::json& j, const std::string& key,
                         const std::string& where) {
  if (!j.contains(key))
    throw Error("profile document: missing field '" + key + "' in " + where);
  const auto& v = j.at(key);
  if (!v.is_number_integer())
    throw Error("profile document: field '" + key + "' in " + where +
                " must be a base-10 integer");
  return v.get<std::int64_t>();
}

std::string require_str(const nlohmann::json& j, const std::string& key,
                        const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw Error("profile document: missing string field '" + key + "' in " + where);
  return j.at(key).get<std::string>();
}

}  // namespace

ModelProfile parse_model_profile(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("profile document: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error("profile document: top level must be an object");

  ModelProfile p;
  p.model_name = doc.value("model_name", std::string{});
  if (!doc.contains("input") || !doc.at("input").is_object())
    throw Error("profile document: missing 'input' object");
  p.input_bytes = require_int(doc.at("input"), "output_bytes", "input");

  if (!doc.contains("layers") || !doc.at("layers").is_array())
    throw Error("profile document: missing 'layers' array");
  for (const auto& jl : doc.at("layers")) {
    LayerProfile l;
    l.id = require_str(jl, "id", "layer");
    l.xi_device_us = require_int(jl, "xi_device_us", "layer " + l.id);
    l.xi_server_us = require_int(jl, "xi_server_us", "layer " + l.id);
    l.param_bytes = require_int(jl, "param_bytes", "layer " + l.id);
    l.output_bytes = require_int(jl, "output_bytes", "layer " + l.id);
    p.layers.push_back(std::move(l));
  }

  for (const auto& je : doc.value("edges", nlohmann::json::array())) {
    if (!je.is_array() || je.size() != 2 || !je[0].is_string() || !je[1].is_string())
      throw Error("profile document: each edge must be a [parent, child] pair");
    std::string u = je[0].get<std::string>();
    std::string v = je[1].get<std::string>();
    if (v == kInputId)
      throw Error("profile document: the input pseudo-layer cannot be an edge target");
    if (u == kInputId)
      p.input_feeds.push_back(v);
    else
      p.edges.emplace_back(std::move(u), std::move(v));
  }

  for (const auto& jb : doc.value("blocks", nlohmann::json::array())) {
    BlockAnnotation b;
    b.block_id = require_str(jb, "block_id", "block");
    b.template_id = jb.value("template_id", std::string{});
    b.input_layer_id = require_str(jb, "input_layer_id", "block " + b.block_id);
    if (!jb.contains("members") || !jb.at("members").is_array())
      throw Error("profile document: block '" + b.block_id + "' needs a members array");
    for (const auto& m : jb.at("members")) b.members.push_back(m.get<std::string>());
    p.blocks.push_back(std::move(b));
  }

  p.finalize();
  return p;
}

std::string serialize_profile(const ModelProfile& p) {
  nlohmann::ordered_json doc;
  doc["model_name"] = p.model_name;
  doc["input"] = {{"output_bytes", p.input_bytes}};
  doc["layers"] = nlohmann::ordered_json::array();
  for (const auto& l : p.layers) {
    doc["layers"].push_back({{"id", l.id},
                             {"xi_device_us", l.xi_device_us},
                             {"xi_server_us", l.xi_server_us},
                             {"param_bytes", l.param_bytes},
                             {"output_bytes", l.output_bytes}});
  }
  doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& id : p.input_feeds)
    doc["edges"].push_back({kInputId, id});
  for (const auto& [u, v] : p.edges) doc["edges"].push_back({u, v});
  doc["blocks"] = nlohmann::ordered_json::array();
  for (const auto& b : p.blocks) {
    doc["blocks"].push_back({{"block_id", b.block_id},
                             {"template_id", b.template_id},
                             {"input_layer_id", b.input_layer_id},
                             {"members", b.members}});
  }
  return doc.dump(2) + "\n";
}

std::vector<Diagnostic> validate_profile(const ModelProfile& p) {
  std::vector<Diagnostic> out;
  auto flag = [&out](std::string subject, std::string rule, std::string detail) {
    out.push_back({std::move(subject), std::move(rule), std::move(detail)});
  };

  if (p.input_bytes < 0)
    flag(kInputId, "nonnegative-fields", "input output_bytes is negative");
  for (const auto& l : p.layers) {
    if (l.xi_device_us < 0 || l.xi_server_us < 0 || l.param_bytes < 0 ||
        l.output_bytes < 0)
      flag(l.id, "nonnegative-fields", "layer has a negative field");
    if (l.xi_device_us < l.xi_server_us)
      flag(l.id, "server-at-least-as-strong",
           "xi_device_us " + std::to_string(l.xi_device_us) + " < xi_server_us " +
               std::to_string(l.xi_server_us));
  }

  std::unordered_map<std::string, std::string> owner;
  std::set<std::string> block_ids;
  for (const auto& b : p.blocks) {
    if (!block_ids.insert(b.block_id).second)
      flag(b.block_id, "unique-block-id", "block id declared twice");
    if (b.members.empty()) {
      flag(b.block_id, "nonempty-members", "block has no members");
      continue;
    }
    std::set<std::string> members(b.members.begin(), b.members.end());
    if (members.size() != b.members.size())
      flag(b.block_id, "distinct-members", "member list repeats a layer");
    for (const auto& m : members) {
      auto [it, fresh] = owner.emplace(m, b.block_id);
      if (!fresh)
        flag(b.block_id, "disjoint-blocks",
             "member '" + m + "' already belongs to block '" + it->second + "'");
    }
    if (members.count(b.input_layer_id))
      flag(b.block_id, "external-input",
           "input layer '" + b.input_layer_id + "' is a member of the block");

    // The block input must actually feed some member.
    bool feeds = false;
    if (b.input_layer_id == kInputId) {
      for (const auto& c : p.input_consumers())
        if (members.count(c)) feeds = true;
    } else if (p.contains(b.input_layer_id)) {
      for (const auto& c : p.children(b.input_layer_id))
        if (members.count(c)) feeds = true;
    }
    if (!feeds)
      flag(b.block_id, "input-feeds-block",
           "input layer '" + b.input_layer_id + "' has no edge into the block");

    // Weak connectivity of the member-induced subgraph.
    std::unordered_map<std::string, std::vector<std::string>> und;
    for (const auto& m : members)
      for (const auto& c : p.children(m))
        if (members.count(c)) {
          und[m].push_back(c);
          und[c].push_back(m);
        }
    std::set<std::string> seen;
    std::deque<std::string> q{*members.begin()};
    seen.insert(*members.begin());
    while (!q.empty()) {
      auto u = q.front();
      q.pop_front();
      for (const auto& v : und[u])
        if (seen.insert(v).second) q.push_back(v);
    }
    if (seen.size() != members.size())
      flag(b.block_id, "connected-members", "member-induced subgraph is disconnected");
  }

  return out;
}

}  // namespace splitflow
