#include "splitflow/fixtures.hpp"

#include <algorithm>

namespace splitflow {

namespace {

LayerProfile layer(std::string id, Micros xi_device, Micros xi_server, Bytes params,
                   Bytes output) {
  return {std::move(id), xi_device, xi_server, params, output};
}

// The three-vertex chain used throughout: 1 MB/s links and one local
// iteration put the optimal cut after v1 at 4 s.
ModelProfile chain3() {
  ModelProfile p;
  p.model_name = "chain3";
  p.input_bytes = 4'000'000;
  p.layers.push_back(layer("v1", 1'000'000, 1'000'000, 0, 1'000'000));
  p.layers.push_back(layer("v2", 5'000'000, 1'000'000, 0, 0));
  p.edges = {{"v1", "v2"}};
  return p;
}

ModelProfile diamond() {
  ModelProfile p;
  p.model_name = "diamond";
  p.input_bytes = 1600;
  p.layers.push_back(layer("v1", 300, 100, 800, 2000));
  p.layers.push_back(layer("v2", 400, 150, 1600, 1200));
  p.layers.push_back(layer("v3", 200, 80, 800, 1600));
  p.layers.push_back(layer("v4", 500, 120, 2400, 400));
  p.edges = {{"v1", "v2"}, {"v1", "v3"}, {"v2", "v4"}, {"v3", "v4"}};
  return p;
}

// One parent with three children and a join, the shape used to illustrate
// the auxiliary-vertex transform.
ModelProfile fig3() {
  ModelProfile p;
  p.model_name = "fig3";
  p.input_bytes = 8000;
  p.layers.push_back(layer("v1", 100, 50, 0, 1000));
  p.layers.push_back(layer("v2", 900, 100, 0, 4000));
  p.layers.push_back(layer("v3", 900, 100, 0, 4000));
  p.layers.push_back(layer("v4", 900, 100, 0, 4000));
  p.layers.push_back(layer("v5", 900, 100, 0, 0));
  p.edges = {{"v1", "v2"}, {"v1", "v3"}, {"v1", "v4"},
             {"v2", "v5"}, {"v3", "v5"}, {"v4", "v5"}};
  return p;
}

// v1 feeds a four-member block whose entry broadcasts to the two middle
// layers and straight to the output join.
ModelProfile fig7() {
  ModelProfile p;
  p.model_name = "fig7";
  p.input_bytes = 1600;
  p.layers.push_back(layer("v1", 500, 100, 320, 1000));
  p.layers.push_back(layer("v2", 400, 100, 320, 1200));
  p.layers.push_back(layer("v3", 400, 100, 320, 600));
  p.layers.push_back(layer("v4", 400, 100, 320, 600));
  p.layers.push_back(layer("v5", 400, 100, 320, 0));
  p.edges = {{"v1", "v2"}, {"v2", "v3"}, {"v2", "v4"}, {"v2", "v5"},
             {"v3", "v5"}, {"v4", "v5"}};
  p.blocks.push_back({"fig7_block", "fig7", "v1", {"v2", "v3", "v4", "v5"}});
  return p;
}

ModelProfile resblock() {
  ModelProfile p;
  p.model_name = "resblock";
  p.input_bytes = 4'000'000;
  p.layers.push_back(layer("stem", 20'000, 5'000, 64'000, 2'000'000));
  p.layers.push_back(layer("c1", 30'000, 6'000, 256'000, 500'000));
  p.layers.push_back(layer("c2", 30'000, 6'000, 256'000, 500'000));
  p.layers.push_back(layer("c3", 30'000, 6'000, 256'000, 2'000'000));
  p.layers.push_back(layer("head", 10'000, 2'000, 1'024'000, 0));
  p.edges = {{"stem", "c1"}, {"c1", "c2"}, {"c2", "c3"}, {"stem", "c3"},
             {"c3", "head"}};
  p.blocks.push_back({"res1", "residual", "stem", {"c1", "c2", "c3"}});
  return p;
}

void add_inception_block(ModelProfile& p, const std::string& tag,
                         const std::string& feed, Bytes unit, int in_ch,
                         Micros xi_scale, int* out_ch) {
  const int half = in_ch / 2;
  const int quarter = in_ch / 4;
  auto conv = [&](const std::string& name, int ch) {
    p.layers.push_back(layer(tag + name, Micros(ch) * xi_scale,
                             Micros(ch) * xi_scale / 4, Bytes(ch) * 4000,
                             Bytes(ch) * unit));
  };
  conv("_b11", half);
  conv("_b33r", half);
  conv("_b33", half);
  conv("_b55r", quarter);
  conv("_b55", quarter);
  conv("_bpp", quarter);
  const int cat_ch = half + half + quarter + quarter;
  conv("_cat", cat_ch);
  p.edges.insert(p.edges.end(),
                 {{feed, tag + "_b11"},
                  {feed, tag + "_b33r"},
                  {tag + "_b33r", tag + "_b33"},
                  {feed, tag + "_b55r"},
                  {tag + "_b55r", tag + "_b55"},
                  {feed, tag + "_bpp"},
                  {tag + "_b11", tag + "_cat"},
                  {tag + "_b33", tag + "_cat"},
                  {tag + "_b55", tag + "_cat"},
                  {tag + "_bpp", tag + "_cat"}});
  p.blocks.push_back({tag, "inception", feed,
                      {tag + "_b11", tag + "_b33r", tag + "_b33", tag + "_b55r",
                       tag + "_b55", tag + "_bpp", tag + "_cat"}});
  *out_ch = cat_ch;
}

ModelProfile inception() {
  ModelProfile p;
  p.model_name = "inception";
  const Bytes unit = 100'352;  // 28*28 feature map, fp32, batch 32
  p.input_bytes = 3 * 4 * 32 * 224 * 224;
  p.layers.push_back(layer("stem", 40'000, 10'000, 37'632, 192 * unit));
  p.edges = {};
  int out_ch = 0;
  add_inception_block(p, "inc", "stem", unit, 192, 100, &out_ch);
  p.layers.push_back(layer("head", 30'000, 6'000, Bytes(out_ch) * 4000, 0));
  p.edges.push_back({"inc_cat", "head"});
  return p;
}

ModelProfile denseblock() {
  ModelProfile p;
  p.model_name = "denseblock";
  p.input_bytes = 400'000;
  p.layers.push_back(layer("stem", 20'000, 5'000, 16'000, 1'600'000));
  const std::vector<std::string> members = {"d1", "d2", "d3", "d4"};
  for (const auto& m : members)
    p.layers.push_back(layer(m, 25'000, 5'000, 120'000, 800'000));
  p.layers.push_back(layer("head", 10'000, 2'000, 640'000, 0));
  for (std::size_t i = 0; i < members.size(); ++i) {
    p.edges.push_back({"stem", members[i]});
    for (std::size_t j = i + 1; j < members.size(); ++j)
      p.edges.push_back({members[i], members[j]});
  }
  p.edges.push_back({"d4", "head"});
  p.blocks.push_back({"dense1", "dense", "stem", {"d1", "d2", "d3", "d4"}});
  return p;
}

ModelProfile googlenet() {
  ModelProfile p;
  p.model_name = "googlenet";
  p.input_bytes = 3 * 4 * 32 * 224 * 224;
  // 28x28 / 14x14 / 7x7 stages, fp32, batch 32.
  const Bytes units[] = {100'352, 25'088, 6'272};
  p.layers.push_back(layer("stem1", 60'000, 15'000, 37'632, Bytes(64) * 4 * 100'352));
  p.layers.push_back(layer("stem2", 20'000, 5'000, 16'384, Bytes(64) * 100'352));
  p.layers.push_back(layer("stem3", 70'000, 17'500, 442'368, Bytes(192) * 100'352));
  p.edges = {{"stem1", "stem2"}, {"stem2", "stem3"}};
  std::string feed = "stem3";
  int ch = 192;
  const char* names[] = {"i3a", "i3b", "i4a", "i4b", "i4c", "i4d", "i4e", "i5a", "i5b"};
  for (int i = 0; i < 9; ++i) {
    const int stage = i < 2 ? 0 : (i < 7 ? 1 : 2);
    if ((i == 2 || i == 7)) {
      // Stage-transition pool halves the spatial size before the next block.
      const std::string pool = i == 2 ? "pool3" : "pool4";
      p.layers.push_back(layer(pool, 5'000, 1'250, 0, Bytes(ch) * units[stage]));
      p.edges.push_back({feed, pool});
      feed = pool;
    }
    int out_ch = 0;
    add_inception_block(p, names[i], feed, units[stage], ch, 100, &out_ch);
    feed = std::string(names[i]) + "_cat";
    ch = (out_ch / 4) * 4;  // keep the branch widths integral
  }
  p.layers.push_back(layer("fc", 20'000, 4'000, Bytes(ch) * 4000, 0));
  p.edges.push_back({feed, "fc"});
  return p;
}

ModelProfile resnet18() {
  ModelProfile p;
  p.model_name = "resnet18";
  p.input_bytes = 3 * 4 * 32 * 224 * 224;
  const int stage_ch[] = {64, 64, 128, 128, 256, 256, 512, 512};
  const Bytes stage_unit[] = {401'408, 401'408, 100'352, 100'352,
                              25'088,  25'088,  6'272,   6'272};
  p.layers.push_back(layer("c0", 50'000, 12'500, 37'632, Bytes(64) * 401'408));
  std::string prev = "c0";
  for (int b = 0; b < 8; ++b) {
    const Bytes a = Bytes(stage_ch[b]) * stage_unit[b];
    const Bytes k = Bytes(stage_ch[b]) * Bytes(stage_ch[b]) * 9 * 4;
    const Micros xi = Micros(stage_ch[b]) * 400;
    const std::string ra = "r" + std::to_string(b) + "a";
    const std::string rb = "r" + std::to_string(b) + "b";
    p.layers.push_back(layer(ra, xi, xi / 4, k, a));
    p.layers.push_back(layer(rb, xi, xi / 4, k, a));
    p.edges.push_back({prev, ra});
    p.edges.push_back({ra, rb});
    p.blocks.push_back({"res" + std::to_string(b), "residual2", prev, {ra, rb}});
    prev = rb;
  }
  p.layers.push_back(layer("fc", 10'000, 2'000, 2'048'000, 0));
  p.edges.push_back({prev, "fc"});
  return p;
}

ModelProfile resnet50() {
  ModelProfile p;
  p.model_name = "resnet50";
  p.input_bytes = 3 * 4 * 32 * 224 * 224;
  p.layers.push_back(layer("c0", 50'000, 12'500, 37'632, Bytes(64) * 401'408));
  const int stage_blocks[] = {3, 4, 6, 3};
  const int stage_out[] = {256, 512, 1024, 2048};
  const Bytes stage_unit[] = {401'408, 100'352, 25'088, 6'272};
  std::string prev = "c0";
  int b = 0;
  for (int s = 0; s < 4; ++s) {
    for (int i = 0; i < stage_blocks[s]; ++i, ++b) {
      const int width = stage_out[s] / 4;
      const Bytes unit = stage_unit[s];
      const Micros xi = Micros(width) * 300;
      const std::string r1 = "b" + std::to_string(b) + "_1";
      const std::string r2 = "b" + std::to_string(b) + "_2";
      const std::string r3 = "b" + std::to_string(b) + "_3";
      p.layers.push_back(layer(r1, xi, xi / 4, Bytes(width) * 1024, Bytes(width) * unit));
      p.layers.push_back(layer(r2, xi, xi / 4, Bytes(width) * Bytes(width) * 36, Bytes(width) * unit));
      p.layers.push_back(
          layer(r3, xi, xi / 4, Bytes(width) * Bytes(stage_out[s]) * 4, Bytes(stage_out[s]) * unit));
      p.edges.push_back({prev, r1});
      p.edges.push_back({r1, r2});
      p.edges.push_back({r2, r3});
      p.edges.push_back({prev, r3});  // identity shortcut
      p.blocks.push_back({"res" + std::to_string(b), "bottleneck", prev, {r1, r2, r3}});
      prev = r3;
    }
  }
  p.layers.push_back(layer("fc", 10'000, 2'000, 8'192'000, 0));
  p.edges.push_back({prev, "fc"});
  return p;
}

// 121 layers: stem conv, 58 two-layer dense composites in four groups,
// three transitions, classifier. Every composite consumes the running
// concatenation, so each one sees the group input plus all earlier
// composite outputs.
ModelProfile densenet121() {
  ModelProfile p;
  p.model_name = "densenet121";
  p.input_bytes = 3 * 4 * 32 * 32 * 32;
  const int group_sizes[] = {6, 12, 24, 16};
  const Bytes group_unit[] = {131'072, 32'768, 8'192, 2'048};  // H*W*4*batch32
  const int growth = 32;
  p.layers.push_back(layer("c0", 30'000, 7'500, 6'912, Bytes(64) * 131'072));
  std::string group_input = "c0";
  int carried_ch = 64;
  int composite = 0;
  for (int g = 0; g < 4; ++g) {
    const Bytes unit = group_unit[g];
    std::vector<std::string> produced;  // outputs visible to later composites
    for (int i = 0; i < group_sizes[g]; ++i, ++composite) {
      const std::string ga = "d" + std::to_string(composite) + "a";
      const std::string gb = "d" + std::to_string(composite) + "b";
      const int concat_ch = carried_ch + growth * i;
      p.layers.push_back(layer(ga, 12'000, 3'000, Bytes(concat_ch) * 128 * 4,
                               Bytes(128) * unit));
      p.layers.push_back(layer(gb, 10'000, 2'500, Bytes(128) * growth * 36,
                               Bytes(growth) * unit));
      p.edges.push_back({group_input, ga});
      for (const auto& q : produced) p.edges.push_back({q, ga});
      p.edges.push_back({ga, gb});
      const std::string v_in = produced.empty() ? group_input : produced.back();
      p.blocks.push_back({"dense" + std::to_string(composite), "dense_composite",
                          v_in, {ga, gb}});
      produced.push_back(gb);
    }
    const int total_ch = carried_ch + growth * group_sizes[g];
    if (g < 3) {
      const std::string t = "t" + std::to_string(g);
      const Bytes next_unit = group_unit[g + 1];
      p.layers.push_back(layer(t, 15'000, 3'750, Bytes(total_ch) * Bytes(total_ch / 2) * 4,
                               Bytes(total_ch / 2) * next_unit));
      p.edges.push_back({group_input, t});
      for (const auto& q : produced) p.edges.push_back({q, t});
      group_input = t;
      carried_ch = total_ch / 2;
    } else {
      p.layers.push_back(layer("fc", 8'000, 2'000, Bytes(total_ch) * 4000, 0));
      p.edges.push_back({group_input, "fc"});
      for (const auto& q : produced) p.edges.push_back({q, "fc"});
    }
  }
  return p;
}

}  // namespace

std::vector<std::string> fixture_names() {
  return {"chain3",    "diamond",  "fig3",     "fig7",     "resblock", "inception",
          "denseblock", "googlenet", "resnet18", "resnet50", "densenet121"};
}

ModelProfile make_fixture(const std::string& name) {
  ModelProfile p;
  if (name == "chain3") p = chain3();
  else if (name == "diamond") p = diamond();
  else if (name == "fig3") p = fig3();
  else if (name == "fig7") p = fig7();
  else if (name == "resblock") p = resblock();
  else if (name == "inception") p = inception();
  else if (name == "denseblock") p = denseblock();
  else if (name == "googlenet") p = googlenet();
  else if (name == "resnet18") p = resnet18();
  else if (name == "resnet50") p = resnet50();
  else if (name == "densenet121") p = densenet121();
  else throw Error("unknown fixture '" + name + "'");
  p.finalize();
  return p;
}

}  // namespace splitflow
