#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cropweed/dataset.hpp"

namespace cropweed {

// NMW has two readings: the prose one (0 exactly on crop predicted as
// weed) and the symmetric one (0 on any cross-group non-unknown error).
enum class NmwStrictness { TextIff, Symmetric };

enum class ObjectiveKind { CCE, NMW, DM };

std::string objective_name(ObjectiveKind k);
ObjectiveKind parse_objective(const std::string& s);
std::string strictness_name(NmwStrictness s);
NmwStrictness parse_strictness(const std::string& s);

enum class ErrorClass { Correct, Moderate, Minor, Considerable, Dangerous };

std::string error_class_name(ErrorClass e);

using LabelVector = std::vector<int>;
using BitVector = std::vector<uint8_t>;

// Elementwise exact-match indicator.
BitVector equal_indicator(const LabelVector& y, const LabelVector& yhat);

// bit i is 1 iff target[i] is one of the template categories.
BitVector contain(const std::vector<int>& template_cats, const LabelVector& target);

BitVector nmw_indicator(const LabelVector& y, const LabelVector& yhat, const Taxonomy& tax,
                        NmwStrictness strictness = NmwStrictness::TextIff);

double accuracy(const LabelVector& y, const LabelVector& yhat);

// Crop killing rate: crops predicted as weed over all crops. Unknown
// predictions are not weed predictions.
double ckr(const LabelVector& y, const LabelVector& yhat, const Taxonomy& tax);

double recall_crop(const LabelVector& y, const LabelVector& yhat, const Taxonomy& tax);

ErrorClass classify_error(int y, int yhat, const Taxonomy& tax);

struct EvalReport {
  double accuracy = 0.0;
  double ckr = 0.0;          // NaN when the sample set has no crops
  double recall_crop = 0.0;  // NaN when the sample set has no crops
  long long correct = 0;
  long long moderate = 0;
  long long minor = 0;
  long long considerable = 0;
  long long dangerous = 0;
  long long n_samples = 0;
  // (C+1) x (C+1), truth x prediction, unknown last (truth row stays zero)
  std::vector<std::vector<long long>> confusion;
};

EvalReport evaluate_predictions(const LabelVector& y, const LabelVector& yhat,
                                const Taxonomy& tax);

struct SurrogateResult {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d probs
};

// Differentiable training surrogate for one sample. CCE is -log p[y];
// NMW is -log of the acceptable probability mass for the sample's group.
SurrogateResult surrogate_loss(ObjectiveKind kind, std::span<const double> probs, int y,
                               const Taxonomy& tax,
                               NmwStrictness strictness = NmwStrictness::TextIff);

// DM optimizes its two members separately: even batches step CCE, odd
// batches step NMW.
ObjectiveKind dm_schedule(long long batch_index);

}  // namespace cropweed
