#include "splitflow/randgen.hpp"

#include <random>
#include <set>
#include <utility>

namespace splitflow {

namespace {

using Rng = std::mt19937_64;

int pick(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Bytes size8(Rng& rng, Bytes lo, Bytes hi) {
  return 8 * std::uniform_int_distribution<Bytes>(lo / 8, hi / 8)(rng);
}

LayerProfile random_layer(Rng& rng, const std::string& id) {
  LayerProfile l;
  l.id = id;
  l.xi_device_us = pick(rng, 0, 200'000);
  l.xi_server_us =
      std::uniform_int_distribution<Micros>(0, l.xi_device_us)(rng);
  l.param_bytes = size8(rng, 0, 100'000);
  l.output_bytes = size8(rng, 8, 100'000);
  return l;
}

ModelProfile random_plain_profile(Rng& rng, const RandomProfileOptions& opt) {
  ModelProfile p;
  p.model_name = "random";
  p.input_bytes = size8(rng, 0, 100'000);
  const int n = pick(rng, opt.min_layers, opt.max_layers);
  for (int i = 0; i < n; ++i)
    p.layers.push_back(random_layer(rng, "L" + std::to_string(i)));

  std::set<std::pair<int, int>> used;
  auto connect = [&](int u, int v) {
    if (used.emplace(u, v).second)
      p.edges.push_back({p.layers[u].id, p.layers[v].id});
  };
  for (int i = 1; i < n; ++i) {
    connect(pick(rng, 0, i - 1), i);
    if (pick(rng, 0, 2) == 0) connect(pick(rng, 0, i - 1), i);
  }
  if (opt.ensure_nonlinear && n >= 3) {
    bool nonlinear = false;
    std::vector<int> fanout(n, 0);
    for (const auto& [u, v] : used) fanout[u]++;
    for (int f : fanout) nonlinear |= f >= 2;
    if (!nonlinear) connect(0, n - 1);
  }
  return p;
}

// Block templates over a budget of layers. Each returns the id of its
// output layer.
std::string emit_chain_block(Rng& rng, ModelProfile& p, const std::string& feed,
                             int members, int index) {
  BlockAnnotation b;
  b.block_id = "B" + std::to_string(index);
  b.template_id = "chain";
  b.input_layer_id = feed;
  std::string prev = feed;
  for (int i = 0; i < members; ++i) {
    std::string id = b.block_id + "_m" + std::to_string(i);
    LayerProfile l = random_layer(rng, id);
    if (i + 1 < members && pick(rng, 0, 1) == 0)
      l.output_bytes = 8;  // tiny inner activation; likely fails the test
    p.layers.push_back(l);
    if (prev != feed) p.edges.push_back({prev, id});
    b.members.push_back(id);
    prev = id;
  }
  p.edges.push_back({feed, b.members.front()});
  p.blocks.push_back(b);
  return prev;
}

std::string emit_residual_block(Rng& rng, ModelProfile& p, const std::string& feed,
                                int index) {
  BlockAnnotation b;
  b.block_id = "B" + std::to_string(index);
  b.template_id = "residual";
  b.input_layer_id = feed;
  for (int i = 0; i < 3; ++i) {
    std::string id = b.block_id + "_m" + std::to_string(i);
    p.layers.push_back(random_layer(rng, id));
    b.members.push_back(id);
  }
  p.edges.push_back({feed, b.members[0]});
  p.edges.push_back({b.members[0], b.members[1]});
  p.edges.push_back({b.members[1], b.members[2]});
  p.edges.push_back({feed, b.members[2]});  // skip
  p.blocks.push_back(b);
  return b.members[2];
}

std::string emit_parallel_block(Rng& rng, ModelProfile& p, const std::string& feed,
                                int index) {
  BlockAnnotation b;
  b.block_id = "B" + std::to_string(index);
  b.template_id = "parallel";
  b.input_layer_id = feed;
  for (int i = 0; i < 4; ++i) {
    std::string id = b.block_id + "_m" + std::to_string(i);
    p.layers.push_back(random_layer(rng, id));
    b.members.push_back(id);
  }
  p.edges.push_back({feed, b.members[0]});
  p.edges.push_back({feed, b.members[1]});
  p.edges.push_back({b.members[1], b.members[2]});
  p.edges.push_back({b.members[0], b.members[3]});
  p.edges.push_back({b.members[2], b.members[3]});
  p.blocks.push_back(b);
  return b.members[3];
}

ModelProfile random_block_profile(Rng& rng, const RandomProfileOptions& opt) {
  ModelProfile p;
  p.model_name = "random-blocks";
  p.input_bytes = size8(rng, 8, 100'000);
  p.layers.push_back(random_layer(rng, "G0"));
  std::string tail = "G0";
  int budget = opt.max_layers - 1;
  int index = 0;
  while (budget >= 3) {
    switch (pick(rng, 0, 2)) {
      case 0: {
        const int members = std::min(budget, pick(rng, 2, 3));
        tail = emit_chain_block(rng, p, tail, members, index++);
        budget -= members;
        break;
      }
      case 1:
        tail = emit_residual_block(rng, p, tail, index++);
        budget -= 3;
        break;
      default:
        if (budget < 4) continue;
        tail = emit_parallel_block(rng, p, tail, index++);
        budget -= 4;
        break;
    }
    if (budget > 0 && pick(rng, 0, 1) == 0) {
      std::string id = "G" + std::to_string(index) + "g";
      p.layers.push_back(random_layer(rng, id));
      p.edges.push_back({tail, id});
      tail = id;
      --budget;
    }
  }
  return p;
}

}  // namespace

ModelProfile random_profile(std::uint64_t seed, const RandomProfileOptions& opt) {
  Rng rng(seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL);
  ModelProfile p =
      opt.with_blocks ? random_block_profile(rng, opt) : random_plain_profile(rng, opt);
  p.finalize();
  return p;
}

NetParams random_net_params(std::uint64_t seed) {
  Rng rng(seed * 0xBF58476D1CE4E5B9ULL + 0x94D049BB133111EBULL);
  static const Bytes kRates[] = {100'000,   200'000,   400'000,   500'000, 800'000,
                                 1'000'000, 2'000'000, 4'000'000, 8'000'000};
  NetParams n;
  n.rate_up_Bps = kRates[pick(rng, 0, 8)];
  n.rate_down_Bps = kRates[pick(rng, 0, 8)];
  n.local_iters = pick(rng, 1, 8);
  return n;
}

}  // namespace splitflow
