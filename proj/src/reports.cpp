#include "cropweed/reports.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

using nlohmann::json;

namespace cropweed {

namespace {
json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}
}  // namespace

std::string eval_report_json(const EvalReport& r, const Taxonomy& tax) {
  json doc;
  doc["accuracy"] = r.accuracy;
  doc["ckr"] = number_or_null(r.ckr);
  doc["recall_crop"] = number_or_null(r.recall_crop);
  doc["error_counts"] = {{"moderate", r.moderate},
                         {"minor", r.minor},
                         {"considerable", r.considerable},
                         {"dangerous", r.dangerous}};
  doc["correct"] = r.correct;
  doc["n_samples"] = r.n_samples;
  json labels = json::array();
  for (int i = 0; i <= tax.size(); ++i) labels.push_back(tax.name_of(i));
  doc["confusion_labels"] = labels;
  doc["confusion"] = r.confusion;
  return doc.dump(2) + "\n";
}

std::string class_stats_json(const ClassStats& stats, const SampleRatePlan* plan) {
  json doc;
  json cats = json::object();
  for (const auto& [name, count] : stats.per_category) cats[name] = count;
  doc["per_category"] = cats;
  doc["total_crops"] = stats.total_crops;
  doc["total_weeds"] = stats.total_weeds;
  doc["weed_crop_ratio"] =
      std::isinf(stats.weed_crop_ratio) ? json(nullptr) : json(stats.weed_crop_ratio);
  if (plan) {
    doc["alpha"] = plan->alpha;
    doc["beta"] = plan->beta;
    json rates = json::object();
    for (const auto& [name, k] : plan->rates) rates[name] = k;
    doc["sample_rates"] = rates;
  }
  return doc.dump(2) + "\n";
}

std::string trial_log_json(const SelectResult& result, uint64_t seed) {
  json doc;
  doc["seed"] = seed;
  json trials = json::array();
  for (const Trial& t : result.trials)
    trials.push_back({{"family", family_name(t.genotype.family)},
                      {"genes", genotype_key(t.genotype)},
                      {"dataset", t.dataset_id},
                      {"score", t.val_score},
                      {"seed", t.seed}});
  doc["trials"] = trials;
  json table = json::array();
  for (const ScoreRow& row : result.score_table)
    table.push_back({{"family", family_name(row.genotype.family)},
                     {"genes", genotype_key(row.genotype)},
                     {"dataset", row.dataset_id},
                     {"score", row.score}});
  doc["score_table"] = table;
  json selections = json::object();
  for (const auto& [family, sel] : result.by_family)
    selections[family] = {{"genes", genotype_key(sel.best)},
                          {"branch", sel.branch},
                          {"mean_score", sel.mean_score}};
  doc["selections"] = selections;
  doc["warnings"] = result.warnings;
  return doc.dump(2) + "\n";
}

std::string history_csv(const std::vector<EpochStats>& history) {
  std::string out = "epoch,accuracy,nmw\n";
  char buf[64];
  for (const EpochStats& e : history) {
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f\n", e.epoch, e.accuracy, e.nmw);
    out += buf;
  }
  return out;
}

std::string decisions_json(const std::vector<EnsembleDecision>& decisions) {
  json rows = json::array();
  for (size_t i = 0; i < decisions.size(); ++i) {
    const EnsembleDecision& d = decisions[i];
    rows.push_back({{"object_id", i},
                    {"cate", d.cate},
                    {"type", d.type},
                    {"act", d.act},
                    {"rule_fired", d.rule_fired}});
  }
  json doc;
  doc["decisions"] = rows;
  return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace cropweed
