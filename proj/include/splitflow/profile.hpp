#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "splitflow/types.hpp"

namespace splitflow {

// Reserved id of the input pseudo-layer (the raw-data source).
inline constexpr const char* kInputId = "input";

// Per-layer numbers from an offline profiling pass. Compute delays cover one
// forward+backward pass per local iteration; output_bytes doubles as the
// size of the gradient flowing back across the same edge.
struct LayerProfile {
  std::string id;
  Micros xi_device_us = 0;
  Micros xi_server_us = 0;
  Bytes param_bytes = 0;
  Bytes output_bytes = 0;

  bool operator==(const LayerProfile&) const = default;
};

// A reusable multi-layer component (residual / inception / dense style).
// input_layer_id names the layer whose output feeds the block; it is not a
// member itself and may be the input pseudo-layer.
struct BlockAnnotation {
  std::string block_id;
  std::string template_id;
  std::string input_layer_id;
  std::vector<std::string> members;

  bool operator==(const BlockAnnotation&) const = default;
};

/// Immutable description of a profiled AI model. Fill the public fields,
/// call finalize() once, then treat the object as read-only; finalized
/// profiles are safe for concurrent reads.
class ModelProfile {
 public:
  std::string model_name;
  Bytes input_bytes = 0;  // raw sample batch leaving the input pseudo-layer
  std::vector<LayerProfile> layers;
  std::vector<std::pair<std::string, std::string>> edges;  // layer -> layer
  std::vector<std::string> input_feeds;  // explicit input -> layer edges
  std::vector<BlockAnnotation> blocks;

  // Checks structure (id resolution, duplicates, acyclicity) and builds the
  // lookup tables used by the accessors. Throws Error on structural defects.
  void finalize();

  bool contains(const std::string& id) const;
  const LayerProfile& layer(const std::string& id) const;
  std::size_t layer_count() const { return layers.size(); }

  // Children/parents over declared layer-to-layer edges.
  const std::vector<std::string>& children(const std::string& id) const;
  const std::vector<std::string>& parents(const std::string& id) const;

  // Layers fed by the input pseudo-layer: explicit input_feeds plus every
  // layer without a declared parent.
  const std::vector<std::string>& input_consumers() const { return input_consumers_; }

  const std::vector<std::string>& topo_order() const { return topo_order_; }

  // True when every layer has at most one parent and one child and the
  // input pseudo-layer feeds a single stem.
  bool is_chain() const { return is_chain_; }

  Bytes output_bytes_of(const std::string& id) const;

  bool operator==(const ModelProfile& o) const {
    return model_name == o.model_name && input_bytes == o.input_bytes &&
           layers == o.layers && edges == o.edges &&
           input_feeds == o.input_feeds && blocks == o.blocks;
  }

 private:
  void require_finalized() const;

  bool finalized_ = false;
  bool is_chain_ = false;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::vector<std::string>> children_;
  std::unordered_map<std::string, std::vector<std::string>> parents_;
  std::vector<std::string> input_consumers_;
  std::vector<std::string> topo_order_;
};

struct Diagnostic {
  std::string subject;  // layer or block id
  std::string rule;
  std::string detail;
};

// Parses the JSON profile document (see README for the schema). Structural
// defects (malformed text, duplicate ids, unknown ids, cycles) throw Error.
ModelProfile parse_model_profile(const std::string& text);

std::string serialize_profile(const ModelProfile& p);

// Value-level checks: field ranges, the device-no-weaker-than-server
// assumption, and block annotation invariants. Returns one entry per
// violation; an empty list means the profile is valid.
std::vector<Diagnostic> validate_profile(const ModelProfile& p);

}  // namespace splitflow
