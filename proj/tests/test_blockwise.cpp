#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "splitflow/blockwise.hpp"
#include "splitflow/fixtures.hpp"
#include "splitflow/oracle.hpp"
#include "splitflow/randgen.hpp"
#include "test_support.hpp"

using namespace splitflow;
using test_support::make_profile;

namespace {

NetParams params(Bytes up, Bytes down, int iters, bool input_cost = true) {
  NetParams n;
  n.rate_up_Bps = up;
  n.rate_down_Bps = down;
  n.local_iters = iters;
  n.input_cost = input_cost;
  return n;
}

// Chain block with arc byte weights [8, 2, 8]: v_in feeds m1, m1 -> m2,
// m2 -> m3 (the block output).
ModelProfile chain_block_828() {
  return make_profile(16,
                      {{"v_in", 10, 5, 0, 8},
                       {"m1", 10, 5, 0, 2},
                       {"m2", 10, 5, 0, 8},
                       {"m3", 10, 5, 0, 8},
                       {"tail", 10, 5, 0, 0}},
                      {{"v_in", "m1"}, {"m1", "m2"}, {"m2", "m3"}, {"m3", "tail"}},
                      {{"blk", "chain", "v_in", {"m1", "m2", "m3"}}});
}

}  // namespace

TEST_CASE("chain block min cut is the smallest arc") {
  const ModelProfile p = chain_block_828();
  BlockView view = make_block_view(p, p.blocks[0]);
  CHECK(view.a_in_bytes == 8);
  CHECK(view.dedicated_in_bytes == 8);
  CHECK(block_min_cut(view) == 2);
  CHECK_FALSE(intra_block_test(view));  // 2 < 8
}

TEST_CASE("residual block: the skip arc carries the input cost") {
  const ModelProfile p = make_fixture("resblock");
  BlockView view = make_block_view(p, p.blocks[0]);
  CHECK(view.a_in_bytes == 2'000'000);
  CHECK(block_min_cut(view) == 2'000'000);
  CHECK(intra_block_test(view));  // equality abstracts

  // Exhaustive check over the four-vertex residual shape with per-parent
  // deduplication: a parent's smashed data crosses once as soon as any of
  // its children sits on the far side, so every bipartition pays at least
  // the skip's input activation.
  const Bytes a[] = {2'000'000, 500'000, 500'000, 0};
  const std::vector<std::pair<int, int>> edges = {{0, 1}, {1, 2}, {2, 3}, {0, 3}};
  Bytes best = -1;
  for (std::uint32_t mask = 1; mask < (1u << 4); mask += 2) {
    if (mask & (1u << 3)) continue;
    Bytes value = 0;
    for (int u = 0; u < 4; ++u) {
      if (!(mask & (1u << u))) continue;
      bool crosses = false;
      for (const auto& [from, to] : edges)
        if (from == u && !(mask & (1u << to))) crosses = true;
      if (crosses) value += a[u];
    }
    if (best < 0 || value < best) best = value;
  }
  CHECK(best == 2'000'000);
}

TEST_CASE("block cut equals exhaustive enumeration on a seven-member shape") {
  // Fig. 6-style block DAG with hand-set byte weights.
  const ModelProfile p = make_profile(
      64,
      {{"v_in", 1, 1, 0, 40},
       {"m1", 1, 1, 0, 24},
       {"m2", 1, 1, 0, 16},
       {"m3", 1, 1, 0, 48},
       {"m4", 1, 1, 0, 16},
       {"m5", 1, 1, 0, 24},
       {"m6", 1, 1, 0, 32},
       {"m7", 1, 1, 0, 8}},
      {{"v_in", "m1"},
       {"m1", "m2"},
       {"m1", "m3"},
       {"m2", "m4"},
       {"m3", "m5"},
       {"m4", "m6"},
       {"m5", "m6"},
       {"m6", "m7"}},
      {{"blk", "fig6", "v_in", {"m1", "m2", "m3", "m4", "m5", "m6", "m7"}}});
  BlockView view = make_block_view(p, p.blocks[0]);
  const Bytes got = block_min_cut(view);

  // Independent enumeration with per-parent deduplication: a parent's
  // smashed data crosses once when any of its children is on the far side.
  const std::vector<std::string> ids = {"v_in", "m1", "m2", "m3",
                                        "m4",   "m5", "m6", "m7"};
  Bytes best = -1;
  for (std::uint32_t mask = 1; mask < (1u << 8); mask += 2) {
    if (mask & (1u << 7)) continue;  // m7 stays on the far side
    Bytes value = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!(mask & (1u << i))) continue;
      bool crosses = false;
      for (const auto& c : p.children(ids[i]))
        if (!(mask & (1u << (std::find(ids.begin(), ids.end(), c) - ids.begin()))))
          crosses = true;
      if (crosses) value += p.layer(ids[i]).output_bytes;
    }
    if (best < 0 || value < best) best = value;
  }
  CHECK(got == best);
}

TEST_CASE("multiple outputs are rejected") {
  const ModelProfile p = make_profile(
      16,
      {{"v_in", 1, 1, 0, 8}, {"m1", 1, 1, 0, 8}, {"m2", 1, 1, 0, 8},
       {"t1", 1, 1, 0, 0}, {"t2", 1, 1, 0, 0}},
      {{"v_in", "m1"}, {"v_in", "m2"}, {"m1", "t1"}, {"m2", "t2"}},
      {{"blk", "t", "v_in", {"m1", "m2"}}});
  CHECK_THROWS_WITH_AS(make_block_view(p, p.blocks[0]),
                       doctest::Contains("multiple outputs"), Error);
}

TEST_CASE("boundary equality abstracts") {
  // a_min == a_in exactly.
  const ModelProfile p = make_profile(
      16, {{"v_in", 1, 1, 0, 8}, {"m1", 1, 1, 0, 8}, {"m2", 1, 1, 0, 0}},
      {{"v_in", "m1"}, {"m1", "m2"}}, {{"blk", "t", "v_in", {"m1", "m2"}}});
  BlockView view = make_block_view(p, p.blocks[0]);
  CHECK(block_min_cut(view) == view.a_in_bytes);
  CHECK(intra_block_test(view));
}

TEST_CASE("fig7 fixture shrinks from 17 arcs / 8 vertices to 5 / 4") {
  const ModelProfile p = make_fixture("fig7");
  const NetParams n = params(1000, 1000, 1, false);
  const SplitDag full = restructure(build_split_dag(p, n));
  CHECK(full.vertices.size() == 8);
  CHECK(full.arcs.size() == 17);

  const SplitDag small = abstract_blocks(build_split_dag(p, n), p);
  CHECK(small.vertices.size() == 4);
  CHECK(small.arcs.size() == 5);
}

TEST_CASE("abstraction aggregates the four weight classes") {
  const ModelProfile p = make_fixture("fig7");
  const NetParams n = params(1000, 1000, 1, false);
  const SplitDag g = build_split_dag(p, n);
  const SplitDag small = abstract_blocks(g, p);

  auto cap = [&](const SplitDag& d, const std::string& from, const std::string& to) {
    const int u = d.vertex(from), v = d.vertex(to);
    for (const auto& a : d.arcs)
      if (a.from == u && a.to == v) return a.cap_us;
    return Micros{-1};
  };
  Micros exec_device = 0, exec_server = 0;
  for (const auto& m : p.blocks[0].members) {
    exec_device += cap(g, m, "S");
    exec_server += cap(g, "D", m);
  }
  CHECK(cap(small, "fig7_block", "S") == exec_device);
  CHECK(cap(small, "D", "fig7_block") == exec_server);
  CHECK(cap(small, "v1", "fig7_block") == cap(g, "v1", "v2"));
}

TEST_CASE("single-layer block abstraction is a relabeling") {
  const ModelProfile p = make_profile(
      16, {{"v_in", 10, 5, 8, 8}, {"solo", 20, 10, 16, 24}, {"tail", 10, 5, 8, 0}},
      {{"v_in", "solo"}, {"solo", "tail"}},
      {{"blk", "t", "v_in", {"solo"}}});
  const NetParams n = params(1000, 1000, 2);
  const SplitDag g = build_split_dag(p, n);
  const SplitDag small = abstract_blocks(g, p);
  CHECK(small.vertices.size() == g.vertices.size());
  CHECK(small.arcs.size() == g.arcs.size());
  const SplitDecision a = blockwise_split(p, n);
  const SplitDecision b = optimal_split(p, n);
  CHECK(a.delay_us == b.delay_us);
}

TEST_CASE("abstracting a failing block is an error") {
  const ModelProfile p = chain_block_828();
  const SplitDag g = build_split_dag(p, params(1000, 1000, 1));
  CHECK_THROWS_WITH_AS(abstract_blocks(g, p), doctest::Contains("failed"), Error);
}

TEST_CASE("no blocks declared behaves like the plain splitter") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const ModelProfile p = random_profile(seed);
    const NetParams n = random_net_params(seed);
    const SplitDecision a = blockwise_split(p, n);
    const SplitDecision b = optimal_split(p, n);
    CHECK(a.delay_us == b.delay_us);
    CHECK(a.partition == b.partition);
    CHECK(a.method == SplitMethod::blockwise);
  }
}

TEST_CASE("block-structured instances match the plain splitter and oracle") {
  RandomProfileOptions opt;
  opt.with_blocks = true;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const ModelProfile p = random_profile(seed, opt);
    const NetParams n = random_net_params(seed);
    const SplitDecision blockwise = blockwise_split(p, n);
    const SplitDecision plain = optimal_split(p, n);
    const SplitDecision oracle = oracle_optimal(p, n);
    REQUIRE(blockwise.delay_us == plain.delay_us);
    REQUIRE(blockwise.delay_us == oracle.delay_us);
  }
}

TEST_CASE("strict all-or-nothing mode still finds the optimum") {
  RandomProfileOptions opt;
  opt.with_blocks = true;
  BlockwiseOptions strict;
  strict.strict_all_or_nothing = true;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const ModelProfile p = random_profile(seed, opt);
    const NetParams n = random_net_params(seed);
    CHECK(blockwise_split(p, n, strict).delay_us == oracle_optimal(p, n).delay_us);
  }
}

TEST_CASE("googlenet fixture abstracts all nine blocks") {
  const ModelProfile p = make_fixture("googlenet");
  for (const auto& b : p.blocks) {
    BlockView view = make_block_view(p, b);
    block_min_cut(view);
    CHECK(intra_block_test(view));
  }
  const NetParams n = params(20'000'000, 20'000'000, 5);
  const SplitDag full = build_split_dag(p, n);
  const SplitDag small = abstract_blocks(full, p);
  // 9 blocks of 7 members collapse to 9 vertices.
  CHECK(small.vertices.size() == full.vertices.size() - 9 * 6);
  CHECK(blockwise_split(p, n).delay_us ==
        mincut_split(p, n, build_split_dag(p, n), SplitMethod::dag_mincut).delay_us);
}

TEST_CASE("densenet fixture abstracts through the bypass rule") {
  const ModelProfile p = make_fixture("densenet121");
  int passing = 0;
  for (const auto& b : p.blocks) {
    BlockView view = make_block_view(p, b);
    CHECK(view.dedicated_parents.empty());
    block_min_cut(view);
    if (intra_block_test(view)) ++passing;
  }
  CHECK(passing == 58);
}
