#pragma once

#include <string>
#include <vector>

#include "cropweed/dataset.hpp"
#include "cropweed/ensemble.hpp"
#include "cropweed/objectives.hpp"
#include "cropweed/search.hpp"
#include "cropweed/train.hpp"

namespace cropweed {

// Fixed-schema JSON for an EvalReport: accuracy, ckr, recall_crop,
// error_counts.{moderate,minor,considerable,dangerous}, confusion (rows =
// truth, cols = prediction, unknown last). ckr/recall_crop serialize as
// null when the dataset holds no crops.
std::string eval_report_json(const EvalReport& r, const Taxonomy& tax);

std::string class_stats_json(const ClassStats& stats, const SampleRatePlan* plan = nullptr);

// Trial log: every probe trial, fallback score-table rows, and the chosen
// genotype per family.
std::string trial_log_json(const SelectResult& result, uint64_t seed);

// history CSV, columns `epoch,accuracy,nmw`, %.6f.
std::string history_csv(const std::vector<EpochStats>& history);

std::string decisions_json(const std::vector<EnsembleDecision>& decisions);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace cropweed
