#include "cropweed/ensemble.hpp"

#include <algorithm>
#include <stdexcept>

namespace cropweed {

long long CropBudget::total_of(int cat) const {
  auto it = totals.find(cat);
  return it == totals.end() ? 0 : it->second;
}

long long CropBudget::assigned_of(int cat) const {
  auto it = assigned.find(cat);
  return it == assigned.end() ? 0 : it->second;
}

void CropBudget::consume(int cat) {
  long long& a = assigned[cat];
  if (a < total_of(cat)) ++a;
}

namespace {

EnsembleDecision decide(int category, int rule, const Taxonomy& tax) {
  EnsembleDecision d;
  d.category = category;
  d.rule_fired = rule;
  d.cate = tax.name_of(category);
  switch (tax.group_of(category)) {
    case Group::Crop:
      d.type = "crop";
      d.act = "cultivate";
      break;
    case Group::Weed:
      d.type = "weed";
      d.act = "remove";
      break;
    default:
      d.type = "unknown";
      d.act = "review";
      break;
  }
  return d;
}

}  // namespace

EnsembleDecision ensemble_predict(const LabelVector& votes, const Taxonomy& tax,
                                  CropBudget& budget, const EnsemblePolicy& policy) {
  if (votes.empty()) throw std::invalid_argument("ensemble_predict: no votes");
  const int unknown = tax.unknown_index();
  for (int v : votes)
    if (v < 0 || v > unknown)
      throw std::invalid_argument("ensemble_predict: vote " + std::to_string(v) +
                                  " outside the taxonomy");

  const size_t m = votes.size();

  // rule 1: full consensus
  if (std::all_of(votes.begin(), votes.end(), [&](int v) { return v == votes[0]; })) {
    int cat = votes[0];
    if (tax.group_of(cat) == Group::Crop) {
      if (policy.strict_budget && !budget.has_gap(cat)) return decide(unknown, 3, tax);
      budget.consume(cat);
    }
    return decide(cat, 1, tax);
  }

  // rule 2: some crop category holds a strict majority and budget remains
  for (int cat : tax.crop_indices()) {
    size_t n = static_cast<size_t>(std::count(votes.begin(), votes.end(), cat));
    if (2 * n > m) {
      if (!budget.has_gap(cat)) break;  // gap exhausted: rule 3
      budget.consume(cat);
      return decide(cat, 2, tax);
    }
  }

  // rule 3: everything else defers to review
  return decide(unknown, 3, tax);
}

std::vector<EnsembleDecision> ensemble_run(const std::vector<LabelVector>& per_model,
                                           const Taxonomy& tax,
                                           const std::map<int, long long>& totals,
                                           const EnsemblePolicy& policy) {
  if (per_model.empty()) throw std::invalid_argument("ensemble_run: no models");
  const size_t n_objects = per_model[0].size();
  for (const LabelVector& preds : per_model)
    if (preds.size() != n_objects)
      throw std::invalid_argument("ensemble_run: ragged prediction lists (" +
                                  std::to_string(preds.size()) + " vs " +
                                  std::to_string(n_objects) + ")");
  CropBudget budget;
  budget.totals = totals;

  std::vector<EnsembleDecision> out;
  out.reserve(n_objects);
  LabelVector votes(per_model.size());
  for (size_t i = 0; i < n_objects; ++i) {
    for (size_t k = 0; k < per_model.size(); ++k) votes[k] = per_model[k][i];
    out.push_back(ensemble_predict(votes, tax, budget, policy));
  }
  return out;
}

}  // namespace cropweed
