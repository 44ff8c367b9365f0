#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "splitflow/profile.hpp"
#include "splitflow/split_dag.hpp"
#include "splitflow/splitter.hpp"

namespace splitflow {

// Local cut analysis of one block. The cut graph runs from the feeding
// layer(s) through the members to the single output member, with every arc
// weighted by the smashed-data size of its parent (bytes). External parents
// whose children all lie inside the block ("dedicated") contribute their
// activation to the block's input cost; parents that also feed vertices
// past the block ("bypassing") pay that cost under every placement, so
// their arcs enter the graph with weight zero.
struct BlockView {
  std::string block_id;
  std::string input_id;   // v_in from the annotation
  std::string output_id;  // unique member with external (or no) children
  std::vector<std::string> members;
  Bytes a_in_bytes = 0;          // smashed-data size of v_in
  Bytes dedicated_in_bytes = 0;  // total over dedicated parents; equals
                                 // a_in_bytes for single-input blocks
  // False when a bypassing parent reaches no vertex downstream of the
  // block's output; the test then fails conservatively.
  bool external_sound = true;
  std::vector<std::string> dedicated_parents;
  std::vector<std::string> bypass_parents;

  // Cut graph, built on demand by block_min_cut from the arc triples
  // collected during classification.
  std::vector<std::tuple<std::string, std::string, Bytes>> source_arcs;
  std::vector<std::tuple<std::string, std::string, Bytes>> local_arcs;
  SplitDag graph;
  bool graph_built = false;

  bool cut_computed = false;
  Bytes a_min_bytes = 0;
  std::vector<std::string> min_cut_device_members;
};

// Classifies a block's surroundings and collects its cut graph. Throws on
// unsupported shapes (several output members).
BlockView make_block_view(const ModelProfile& p, const BlockAnnotation& b);

// Minimum input->output cut of the block graph after the propagation-only
// auxiliary-vertex restructuring, in bytes. Caches the value and the
// device-side member set on the view.
Bytes block_min_cut(BlockView& b);

// True iff cutting anywhere inside the block costs at least as much smashed
// data as cutting right before it, so the block can be abstracted without
// losing the optimum.
bool intra_block_test(const BlockView& b);

// Replaces each listed block with a single vertex: execution weights sum
// over the members, an arc from an external parent keeps its single weight,
// and an arc to an external child sums the member arcs into it. Every
// listed block must pass the intra-block test.
SplitDag abstract_blocks(const SplitDag& g, const ModelProfile& p,
                         const std::vector<std::string>& block_ids);

// All declared blocks.
SplitDag abstract_blocks(const SplitDag& g, const ModelProfile& p);

struct BlockwiseOptions {
  // When set, reproduces the all-or-nothing control flow: blocks are
  // abstracted only if every instance passes the test. The default tests
  // each instance independently and abstracts the passing ones.
  bool strict_all_or_nothing = false;
};

// Block-wise split: per-block test, selective abstraction, then the min-cut
// pipeline on the simplified graph. Returned partitions expand block
// vertices back to their member layers.
SplitDecision blockwise_split(const ModelProfile& p, const NetParams& n,
                              const BlockwiseOptions& opts = {});

}  // namespace splitflow
