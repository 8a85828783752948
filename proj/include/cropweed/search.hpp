#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cropweed/genotype.hpp"
#include "cropweed/train.hpp"

namespace cropweed {

// A dataset as the search sees it. train/val stay null when an injected
// scorer never touches pixels (tests, mocks).
struct DatasetRef {
  std::string id;
  const TensorDataset* train = nullptr;
  const TensorDataset* val = nullptr;
  int num_classes = 0;
};

struct Trial {
  Genotype genotype;
  std::string dataset_id;
  double val_score = 0;  // validation Accuracy of the probe run
  uint64_t seed = 0;
};

struct ScoreRow {
  Genotype genotype;
  std::string dataset_id;
  double score = 0;
};

struct SearchConfig {
  int trials_per_dataset = 12;
  int keep_top_k = 5;
  int probe_epochs = 5;
  uint64_t seed = 0;
  int probe_batch = 32;
  double probe_lr = 0.01;
  double probe_momentum = 0.9;

  void validate() const;
};

// Scores one genotype on one dataset (val Accuracy of a short training by
// default); injectable so Algorithm 2's decision logic is testable without
// real training.
using TrialScorer = std::function<double(const Genotype&, const DatasetRef&, uint64_t seed)>;

// Replaces search_trials wholesale when tests need hand-built trial lists.
using TrialSearchFn =
    std::function<std::vector<Trial>(Family, const DatasetRef&, const SearchConfig&)>;

TrialScorer make_probe_scorer(const SearchConfig& cfg);

// The per-trial probe seed; exposed so resumed runs and score-table rows
// reproduce exactly.
uint64_t trial_seed(const SearchConfig& cfg, Family family, const std::string& dataset_id,
                    const Genotype& g);

// Seeded uniform sample of distinct budget-respecting genotypes, probe-
// scored; top keep_top_k by (score desc, key asc). A gene space smaller
// than trials_per_dataset is used whole with a warning.
std::vector<Trial> search_trials(Family family, const DatasetRef& ds, const SearchConfig& cfg,
                                 const TrialScorer& scorer,
                                 std::vector<std::string>* warnings = nullptr);

std::vector<ScoreRow> evaluate_trial(const Genotype& g, const std::vector<DatasetRef>& datasets,
                                     const SearchConfig& cfg, const TrialScorer& scorer);

struct FamilySelection {
  Genotype best;
  std::string branch;  // "common" or "score_table"
  double mean_score = 0;
};

struct SelectResult {
  std::map<std::string, FamilySelection> by_family;  // keyed by family_name
  std::vector<Trial> trials;                         // every probe trial, in run order
  std::vector<ScoreRow> score_table;                 // fallback rows (empty on common branch)
  std::vector<std::string> warnings;
};

// Algorithm 2: per family, search every dataset; pick the best genotype
// common to all trial lists, else fall back to scoring every trial genotype
// on every dataset.
SelectResult select_optimal(const std::vector<Family>& families,
                            const std::vector<DatasetRef>& datasets, const SearchConfig& cfg,
                            const TrialScorer& scorer, const TrialSearchFn& search_fn = nullptr);

}  // namespace cropweed
