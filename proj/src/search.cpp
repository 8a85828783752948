#include "cropweed/search.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "cropweed/rng.hpp"

namespace cropweed {

void SearchConfig::validate() const {
  if (trials_per_dataset < 1 || keep_top_k < 1 || probe_epochs < 1 || probe_batch < 1)
    throw std::invalid_argument("search config: counts must be positive");
  if (keep_top_k > trials_per_dataset)
    throw std::invalid_argument("search config: keep_top_k exceeds trials_per_dataset");
  if (probe_lr < 0 || probe_momentum < 0 || probe_momentum >= 1)
    throw std::invalid_argument("search config: bad probe optimizer values");
}

uint64_t trial_seed(const SearchConfig& cfg, Family family, const std::string& dataset_id,
                    const Genotype& g) {
  return derive_seed(cfg.seed,
                     "trial/" + family_name(family) + "/" + dataset_id + "/" + genotype_key(g));
}

TrialScorer make_probe_scorer(const SearchConfig& cfg) {
  return [cfg](const Genotype& g, const DatasetRef& ds, uint64_t seed) {
    if (!ds.train || !ds.val)
      throw std::invalid_argument("probe scorer: dataset '" + ds.id + "' has no tensor data");
    Model m = realize(g, ds.num_classes, seed, ds.train->side);
    TrainConfig tc;
    tc.input_side = ds.train->side;
    tc.batch_size = cfg.probe_batch;
    tc.epochs = cfg.probe_epochs;
    tc.learning_rate = cfg.probe_lr;
    tc.momentum = cfg.probe_momentum;
    tc.seed = seed;
    return train_model(m, *ds.train, *ds.val, ObjectiveKind::CCE, tc).final_accuracy;
  };
}

std::vector<Trial> search_trials(Family family, const DatasetRef& ds, const SearchConfig& cfg,
                                 const TrialScorer& scorer, std::vector<std::string>* warnings) {
  cfg.validate();
  if (ds.num_classes < 2)
    throw std::invalid_argument("search_trials: dataset '" + ds.id + "' needs >= 2 classes");

  // Budget margin includes the unknown class so a selected genotype can be
  // fully trained under any objective afterwards.
  std::vector<Genotype> pool;
  for (Genotype& g : enumerate_family(family))
    if (param_count(g, ds.num_classes + 1) <= kParamBudget) pool.push_back(std::move(g));
  if (pool.empty())
    throw std::runtime_error("search_trials: no budget-respecting genotypes in family " +
                             family_name(family));

  size_t take = static_cast<size_t>(cfg.trials_per_dataset);
  if (pool.size() < take) {
    if (warnings)
      warnings->push_back("family " + family_name(family) + " has only " +
                          std::to_string(pool.size()) + " budget-respecting genotypes; using all");
    take = pool.size();
  }
  Rng rng = make_rng(cfg.seed, "search/" + family_name(family) + "/" + ds.id);
  for (size_t i = 0; i < take; ++i) {
    size_t j = i + static_cast<size_t>(rand_below(rng, pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);

  std::vector<Trial> trials;
  trials.reserve(take);
  for (const Genotype& g : pool) {
    Trial t;
    t.genotype = g;
    t.dataset_id = ds.id;
    t.seed = trial_seed(cfg, family, ds.id, g);
    t.val_score = scorer(g, ds, t.seed);
    trials.push_back(std::move(t));
  }
  std::stable_sort(trials.begin(), trials.end(), [](const Trial& a, const Trial& b) {
    if (a.val_score != b.val_score) return a.val_score > b.val_score;
    return genotype_key(a.genotype) < genotype_key(b.genotype);
  });
  if (trials.size() > static_cast<size_t>(cfg.keep_top_k)) trials.resize(cfg.keep_top_k);
  return trials;
}

std::vector<ScoreRow> evaluate_trial(const Genotype& g, const std::vector<DatasetRef>& datasets,
                                     const SearchConfig& cfg, const TrialScorer& scorer) {
  validate_genotype(g);
  std::vector<ScoreRow> rows;
  for (const DatasetRef& ds : datasets) {
    // fresh head per dataset: the scorer realizes with ds.num_classes
    uint64_t seed = trial_seed(cfg, g.family, ds.id, g);
    rows.push_back({g, ds.id, scorer(g, ds, seed)});
  }
  return rows;
}

SelectResult select_optimal(const std::vector<Family>& families,
                            const std::vector<DatasetRef>& datasets, const SearchConfig& cfg,
                            const TrialScorer& scorer, const TrialSearchFn& search_fn) {
  cfg.validate();
  if (families.empty()) throw std::invalid_argument("select_optimal: no families");
  if (datasets.empty()) throw std::invalid_argument("select_optimal: no datasets");

  SelectResult result;
  for (Family family : families) {
    // one trial list per dataset
    std::vector<std::vector<Trial>> per_ds;
    for (const DatasetRef& ds : datasets) {
      std::vector<Trial> trials = search_fn
                                      ? search_fn(family, ds, cfg)
                                      : search_trials(family, ds, cfg, scorer, &result.warnings);
      result.trials.insert(result.trials.end(), trials.begin(), trials.end());
      per_ds.push_back(std::move(trials));
    }

    // Common = intersection of the per-dataset key sets
    std::map<std::string, std::vector<double>> scores_by_key;  // key -> per-ds scores
    std::map<std::string, Genotype> geno_by_key;
    for (const auto& trials : per_ds) {
      std::set<std::string> seen;
      for (const Trial& t : trials) {
        std::string key = genotype_key(t.genotype);
        if (!seen.insert(key).second) continue;
        scores_by_key[key].push_back(t.val_score);
        geno_by_key.emplace(key, t.genotype);
      }
    }
    std::vector<std::pair<std::string, double>> common;  // key, mean score
    for (const auto& [key, scores] : scores_by_key)
      if (scores.size() == datasets.size()) {
        double sum = 0;
        for (double s : scores) sum += s;
        common.emplace_back(key, sum / scores.size());
      }

    FamilySelection sel;
    if (!common.empty()) {
      sel.branch = "common";
      // ties resolved by key order; the map iteration already sorted keys
      auto best = common.begin();
      for (auto it = common.begin(); it != common.end(); ++it)
        if (it->second > best->second) best = it;
      sel.best = geno_by_key.at(best->first);
      sel.mean_score = best->second;
    } else {
      sel.branch = "score_table";
      // score every trial genotype on every dataset; reuse probe scores
      // already paid for (same trial seed => same result)
      std::map<std::pair<std::string, std::string>, double> have;  // (key, ds) -> score
      for (const auto& trials : per_ds)
        for (const Trial& t : trials) have[{genotype_key(t.genotype), t.dataset_id}] = t.val_score;

      std::string best_key;
      double best_mean = 0;
      for (const auto& [key, geno] : geno_by_key) {
        double sum = 0;
        bool usable = true;
        for (const DatasetRef& ds : datasets) {
          auto it = have.find({key, ds.id});
          double score;
          if (it != have.end()) {
            score = it->second;
          } else {
            try {
              score = scorer(geno, ds, trial_seed(cfg, family, ds.id, geno));
            } catch (const std::exception& e) {
              result.warnings.push_back("score table skips " + key + " on " + ds.id + ": " +
                                        e.what());
              usable = false;
              break;
            }
          }
          result.score_table.push_back({geno, ds.id, score});
          sum += score;
        }
        if (!usable) continue;
        double mean = sum / datasets.size();
        if (best_key.empty() || mean > best_mean) {  // key order breaks ties (map is sorted)
          best_key = key;
          best_mean = mean;
        }
      }
      if (best_key.empty())
        throw std::runtime_error("select_optimal: no scorable genotype for family " +
                                 family_name(family));
      sel.best = geno_by_key.at(best_key);
      sel.mean_score = best_mean;
    }
    result.by_family.emplace(family_name(family), std::move(sel));
  }
  return result;
}

}  // namespace cropweed
