#pragma once

#include "cropweed/model.hpp"
#include "cropweed/objectives.hpp"
#include "cropweed/tensor.hpp"

namespace cropweed {

// Compares analytic parameter gradients against central finite differences
// (h = 1e-5) on every parameter; returns max |ga-gn| / max(1e-8, |ga|+|gn|).
// Intended for models <= 5,000 params.
double gradient_check(Model& model, const Tensor& batch, const LabelVector& labels,
                      ObjectiveKind kind, const Taxonomy& tax,
                      NmwStrictness strictness = NmwStrictness::TextIff, double h = 1e-5);

// Mean surrogate loss of a batch under the model's current weights.
double batch_loss(Model& model, const Tensor& batch, const LabelVector& labels,
                  ObjectiveKind kind, const Taxonomy& tax, NmwStrictness strictness);

}  // namespace cropweed
