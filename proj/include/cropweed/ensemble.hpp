#pragma once

#include <map>
#include <string>
#include <vector>

#include "cropweed/dataset.hpp"
#include "cropweed/objectives.hpp"

namespace cropweed {

// Known planted counts per crop category; rule 2's "gap" condition.
struct CropBudget {
  std::map<int, long long> totals;    // crop category -> planted count
  std::map<int, long long> assigned;  // finalized so far

  long long total_of(int cat) const;
  long long assigned_of(int cat) const;
  bool has_gap(int cat) const { return assigned_of(cat) < total_of(cat); }
  // Saturating: never drives assigned past totals.
  void consume(int cat);
};

struct EnsemblePolicy {
  // Strict mode subjects rule-1 unanimous crops to the budget gap too; the
  // default treats unanimity as ground truth.
  bool strict_budget = false;
};

struct EnsembleDecision {
  int category = -1;           // taxonomy index, or unknown_index for unknown
  std::string cate;            // category name or "unknown"
  std::string type;            // crop | weed | unknown
  std::string act;             // cultivate | remove | review
  int rule_fired = 0;          // 1 consensus, 2 majority-crop, 3 unknown
};

// One object's votes (categories or unknown) -> decision; mutates budget on
// crop outputs.
EnsembleDecision ensemble_predict(const LabelVector& votes, const Taxonomy& tax,
                                  CropBudget& budget, const EnsemblePolicy& policy = {});

// per_model[k] holds model k's predictions for all N objects; objects are
// folded in input order against one shared budget initialized from totals.
std::vector<EnsembleDecision> ensemble_run(const std::vector<LabelVector>& per_model,
                                           const Taxonomy& tax,
                                           const std::map<int, long long>& totals,
                                           const EnsemblePolicy& policy = {});

}  // namespace cropweed
