#include "cropweed/genotype.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace cropweed {

namespace {
const int kVanillaKernels[] = {3, 5};
const int kVanillaChannels[] = {8, 16, 32};
const int kVanillaHidden[] = {32, 64, 128};
const int kBlockChannels[] = {8, 16, 32, 48};
const int kDilations[] = {2, 3};

template <typename T, size_t N>
bool one_of(T v, const T (&opts)[N]) {
  return std::find(std::begin(opts), std::end(opts), v) != std::end(opts);
}
}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::Vanilla: return "vanilla";
    case Family::Conv: return "conv";
    default: return "dilated";
  }
}

Family parse_family(const std::string& s) {
  if (s == "vanilla") return Family::Vanilla;
  if (s == "conv") return Family::Conv;
  if (s == "dilated") return Family::Dilated;
  throw std::invalid_argument("unknown family '" + s + "' (expected vanilla, conv or dilated)");
}

void validate_genotype(const Genotype& g) {
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("invalid " + family_name(g.family) + " genotype: " + what);
  };
  if (g.units.empty() || g.units.size() > 3)
    fail("needs 1-3 conv stages, has " + std::to_string(g.units.size()));
  for (const GeneUnit& u : g.units) {
    if (g.family == Family::Vanilla) {
      if (!one_of(u.kernel, kVanillaKernels)) fail("kernel must be 3 or 5");
      if (!one_of(u.channels, kVanillaChannels)) fail("channels must be 8, 16 or 32");
      if (u.dilation != 1) fail("dilation is not a vanilla gene");
    } else {
      if (u.kernel != 3) fail("blocks use fixed 3x3 kernels");
      if (!one_of(u.channels, kBlockChannels)) fail("channels must be 8, 16, 32 or 48");
      if (g.family == Family::Conv && u.dilation != 1) fail("dilation is not a conv gene");
      if (g.family == Family::Dilated && !one_of(u.dilation, kDilations))
        fail("dilation must be 2 or 3");
    }
  }
  if (g.family == Family::Vanilla) {
    if (!one_of(g.dense_hidden, kVanillaHidden)) fail("dense_hidden must be 32, 64 or 128");
  } else if (g.dense_hidden != 0) {
    fail("dense_hidden is a vanilla-only gene");
  }
}

std::string genotype_key(const Genotype& g) {
  std::string key = family_name(g.family) + ":";
  char buf[32];
  for (size_t i = 0; i < g.units.size(); ++i) {
    const GeneUnit& u = g.units[i];
    if (i) key += ',';
    if (g.family == Family::Vanilla)
      std::snprintf(buf, sizeof buf, "k%dc%d", u.kernel, u.channels);
    else if (g.family == Family::Conv)
      std::snprintf(buf, sizeof buf, "c%d", u.channels);
    else
      std::snprintf(buf, sizeof buf, "c%dd%d", u.channels, u.dilation);
    key += buf;
  }
  if (g.family == Family::Vanilla) key += ":h" + std::to_string(g.dense_hidden);
  return key;
}

namespace {
// Tiny hand parser for the key grammar; keeps error messages tied to the
// offending key text.
struct KeyCursor {
  const std::string& s;
  size_t pos = 0;
  [[noreturn]] void fail(const std::string& why) const {
    throw std::invalid_argument("bad genotype key '" + s + "': " + why);
  }
  bool done() const { return pos >= s.size(); }
  char peek() const { return done() ? '\0' : s[pos]; }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "' at offset " + std::to_string(pos));
    ++pos;
  }
  int number() {
    size_t start = pos;
    while (!done() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) fail("expected a number at offset " + std::to_string(start));
    return std::stoi(s.substr(start, pos - start));
  }
};
}  // namespace

Genotype parse_genotype_key(const std::string& key) {
  KeyCursor cur{key};
  size_t colon = key.find(':');
  if (colon == std::string::npos) cur.fail("missing ':' after family");
  Genotype g;
  try {
    g.family = parse_family(key.substr(0, colon));
  } catch (const std::exception&) {
    cur.fail("unknown family '" + key.substr(0, colon) + "'");
  }
  cur.pos = colon + 1;
  while (true) {
    GeneUnit u;
    if (g.family == Family::Vanilla) {
      cur.expect('k');
      u.kernel = cur.number();
      cur.expect('c');
      u.channels = cur.number();
    } else {
      cur.expect('c');
      u.channels = cur.number();
      if (g.family == Family::Dilated) {
        cur.expect('d');
        u.dilation = cur.number();
      }
    }
    g.units.push_back(u);
    if (cur.peek() != ',') break;
    ++cur.pos;
  }
  if (g.family == Family::Vanilla) {
    cur.expect(':');
    cur.expect('h');
    g.dense_hidden = cur.number();
  }
  if (!cur.done()) cur.fail("trailing characters at offset " + std::to_string(cur.pos));
  validate_genotype(g);
  return g;
}

long long param_count(const Genotype& g, int head_classes, int input_side) {
  validate_genotype(g);
  if (head_classes < 2) throw std::invalid_argument("param_count: head_classes must be >= 2");
  if (input_side < 1) throw std::invalid_argument("param_count: input_side must be positive");
  long long total = 0;
  long long cin = 3;
  long long side = input_side;
  for (const GeneUnit& u : g.units) {
    if (side % 2 != 0)
      throw std::invalid_argument("param_count: input side " + std::to_string(input_side) +
                                  " not divisible by 2^" + std::to_string(g.units.size()));
    long long ch = u.channels;
    total += static_cast<long long>(u.kernel) * u.kernel * cin * ch + ch;
    if (g.family != Family::Vanilla) total += 9 * ch * ch + ch;  // block's second 3x3 conv
    cin = ch;
    side /= 2;
  }
  long long flat = cin * side * side;
  if (g.family == Family::Vanilla) {
    total += flat * g.dense_hidden + g.dense_hidden;
    total += static_cast<long long>(g.dense_hidden) * head_classes + head_classes;
  } else {
    total += flat * head_classes + head_classes;
  }
  return total;
}

std::vector<Genotype> enumerate_family(Family f) {
  std::vector<Genotype> out;
  // Odometer over per-stage options, first stage most significant, so the
  // order is reproducible and documented by this loop alone.
  auto emit_units = [&](int n, int options, auto&& unit_at, auto&& finish) {
    std::vector<int> idx(n, 0);
    while (true) {
      Genotype g;
      g.family = f;
      for (int i = 0; i < n; ++i) g.units.push_back(unit_at(idx[i]));
      finish(g);
      int d = n - 1;
      while (d >= 0 && ++idx[d] == options) idx[d--] = 0;
      if (d < 0) break;
    }
  };
  for (int n = 1; n <= 3; ++n) {
    if (f == Family::Vanilla) {
      emit_units(
          n, 6,
          [](int i) { return GeneUnit{kVanillaKernels[i / 3], kVanillaChannels[i % 3], 1}; },
          [&](Genotype g) {
            for (int h : kVanillaHidden) {
              g.dense_hidden = h;
              out.push_back(g);
            }
          });
    } else if (f == Family::Conv) {
      emit_units(
          n, 4, [](int i) { return GeneUnit{3, kBlockChannels[i], 1}; },
          [&](Genotype g) { out.push_back(std::move(g)); });
    } else {
      emit_units(
          n, 8, [](int i) { return GeneUnit{3, kBlockChannels[i / 2], kDilations[i % 2]}; },
          [&](Genotype g) { out.push_back(std::move(g)); });
    }
  }
  return out;
}

std::vector<Genotype> enumerate_all_families() {
  std::vector<Genotype> out;
  for (Family f : {Family::Vanilla, Family::Conv, Family::Dilated}) {
    auto part = enumerate_family(f);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace cropweed
