#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cropweed {

enum class Family { Vanilla, Conv, Dilated };

std::string family_name(Family f);
Family parse_family(const std::string& s);

// One conv stage (Vanilla) or conv block (Conv/Dilated). Vanilla uses
// kernel+channels; Conv/Dilated fix kernel=3 and use channels (+dilation on
// the block's second convolution for Dilated).
struct GeneUnit {
  int kernel = 3;
  int channels = 8;
  int dilation = 1;
  bool operator==(const GeneUnit&) const = default;
};

// Head-excluded structural description of a candidate CNN — the identity
// unit for trial intersection. dense_hidden is Vanilla-only (0 otherwise).
struct Genotype {
  Family family = Family::Vanilla;
  std::vector<GeneUnit> units;
  int dense_hidden = 0;
  bool operator==(const Genotype&) const = default;
};

// Throws std::invalid_argument when genes fall outside the family's space.
void validate_genotype(const Genotype& g);

// Canonical body-only key: "vanilla:k3c8,k5c16:h64", "conv:c8,c16",
// "dilated:c8d2,c16d3". Equal keys iff identical body structure.
std::string genotype_key(const Genotype& g);
Genotype parse_genotype_key(const std::string& key);

// Exact count of trainable scalars for the realized model.
long long param_count(const Genotype& g, int head_classes, int input_side = 64);

// Full finite gene space of one family, in a fixed deterministic order.
std::vector<Genotype> enumerate_family(Family f);
std::vector<Genotype> enumerate_all_families();

constexpr long long kParamBudget = 300000;

}  // namespace cropweed
