#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"

#include "cropweed/genotype.hpp"
#include "cropweed/model.hpp"

using namespace cropweed;

TEST_CASE("family space sizes are exactly the gene-product counts") {
  // Vanilla: sum over depth d of (2*3)^d, times 3 hidden widths.
  CHECK(enumerate_family(Family::Vanilla).size() == (6 + 36 + 216) * 3);
  // Conv: 4^1 + 4^2 + 4^3 block-channel choices.
  CHECK(enumerate_family(Family::Conv).size() == 4 + 16 + 64);
  // Dilated: (4*2)^1 + (4*2)^2 + (4*2)^3.
  CHECK(enumerate_family(Family::Dilated).size() == 8 + 64 + 512);
}

TEST_CASE("keys are canonical, injective and round trip over the whole space") {
  std::set<std::string> seen;
  for (Family f : {Family::Vanilla, Family::Conv, Family::Dilated}) {
    for (const Genotype& g : enumerate_family(f)) {
      std::string key = genotype_key(g);
      CHECK(seen.insert(key).second);  // no collisions anywhere
      Genotype back = parse_genotype_key(key);
      CHECK(back.family == g.family);
      CHECK(back.dense_hidden == g.dense_hidden);
      REQUIRE(back.units.size() == g.units.size());
      for (size_t i = 0; i < g.units.size(); ++i) {
        CHECK(back.units[i].kernel == g.units[i].kernel);
        CHECK(back.units[i].channels == g.units[i].channels);
        CHECK(back.units[i].dilation == g.units[i].dilation);
      }
    }
  }
  CHECK(seen.size() == 774 + 84 + 584);
}

TEST_CASE("key grammar examples") {
  CHECK(genotype_key(parse_genotype_key("vanilla:k3c8,k5c16:h64")) == "vanilla:k3c8,k5c16:h64");
  CHECK(genotype_key(parse_genotype_key("conv:c8,c16")) == "conv:c8,c16");
  CHECK(genotype_key(parse_genotype_key("dilated:c8d2,c16d3")) == "dilated:c8d2,c16d3");
}

TEST_CASE("malformed keys fail with positioned errors") {
  for (const char* bad : {
           "",                     // empty
           "vanilla",              // missing genes
           "vgg:c8",               // unknown family
           "vanilla:k3c8",         // missing hidden section
           "vanilla:k4c8:h64",     // kernel outside {3,5}
           "vanilla:k3c9:h64",     // channels outside {8,16,32}
           "vanilla:k3c8:h99",     // hidden outside {32,64,128}
           "conv:c8:h64",          // conv takes no hidden section
           "conv:c12",             // channels outside {8,16,32,48}
           "conv:",                // empty genes
           "conv:c8,",             // trailing comma
           "dilated:c8",           // missing dilation
           "dilated:c8d4",         // dilation outside {2,3}
           "conv:c8,c8,c8,c8",     // depth > 3
           "conv:c8 ,c8",          // stray whitespace
       }) {
    CHECK_THROWS_AS(parse_genotype_key(bad), std::invalid_argument);
  }
}

TEST_CASE("validate_genotype rejects out-of-space structures") {
  Genotype g;
  g.family = Family::Conv;
  g.units = {{3, 8, 1}};
  CHECK_NOTHROW(validate_genotype(g));
  g.units.clear();
  CHECK_THROWS_AS(validate_genotype(g), std::invalid_argument);  // no units
  g.units = {{3, 8, 1}, {3, 8, 1}, {3, 8, 1}, {3, 8, 1}};
  CHECK_THROWS_AS(validate_genotype(g), std::invalid_argument);  // too deep
  g.units = {{3, 8, 2}};
  g.family = Family::Conv;
  CHECK_THROWS_AS(validate_genotype(g), std::invalid_argument);  // conv never dilates
  g.family = Family::Vanilla;
  g.units = {{3, 8, 1}};
  g.dense_hidden = 0;
  CHECK_THROWS_AS(validate_genotype(g), std::invalid_argument);  // vanilla needs hidden
}

TEST_CASE("param_count equals the realized model's parameter total") {
  // Cross-check the closed-form count against actually constructed layers,
  // over a sample from each family and a couple of heads/sides.
  int step = 0;
  for (Family f : {Family::Vanilla, Family::Conv, Family::Dilated}) {
    auto space = enumerate_family(f);
    for (size_t i = 0; i < space.size(); i += 37) {  // systematic sample
      const Genotype& g = space[i];
      for (int head : {4, 5}) {
        long long want = param_count(g, head, 64);
        if (want > kParamBudget) continue;
        Model m = realize(g, head, 1234 + step, 64);
        CHECK(m.num_params() == want);
        ++step;
      }
    }
  }
  CHECK(step > 30);  // the sample actually covered something
}

TEST_CASE("param_count matches a hand computation for one known genotype") {
  // conv:c8,c16 at side 64, head 5:
  //   block1: 3x3x3x8 + 8 = 224, 3x3x8x8 + 8 = 584    (pool -> 32)
  //   block2: 3x3x8x16 + 16 = 1168, 3x3x16x16 + 16 = 2320 (pool -> 16)
  //   head:   16*16*16 = 4096 -> 4096*5 + 5 = 20485
  Genotype g = parse_genotype_key("conv:c8,c16");
  CHECK(param_count(g, 5, 64) == 224 + 584 + 1168 + 2320 + 20485);

  // vanilla:k5c8:h32 at side 64, head 4:
  //   conv: 5x5x3x8 + 8 = 608 (pool -> 32)
  //   dense: 8*32*32=8192 -> 8192*32 + 32 = 262176; head: 32*4 + 4 = 132
  Genotype v = parse_genotype_key("vanilla:k5c8:h32");
  CHECK(param_count(v, 4, 64) == 608 + 262176 + 132);
}

TEST_CASE("enumeration order is deterministic and materially stable") {
  auto a = enumerate_family(Family::Dilated);
  auto b = enumerate_family(Family::Dilated);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(genotype_key(a[i]) == genotype_key(b[i]));
  // Depth-1 genotypes come first.
  CHECK(a[0].units.size() == 1);
  CHECK(a.back().units.size() == 3);
}
