#include "cropweed/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cropweed {

double batch_loss(Model& model, const Tensor& batch, const LabelVector& labels,
                  ObjectiveKind kind, const Taxonomy& tax, NmwStrictness strictness) {
  Tensor probs = model.forward_probs(batch);
  double total = 0;
  for (int n = 0; n < probs.n; ++n) {
    const double* row = probs.data.data() + static_cast<size_t>(n) * probs.c;
    total += surrogate_loss(kind, std::span<const double>(row, probs.c), labels[n], tax,
                            strictness)
                 .loss;
  }
  return total / probs.n;
}

double gradient_check(Model& model, const Tensor& batch, const LabelVector& labels,
                      ObjectiveKind kind, const Taxonomy& tax, NmwStrictness strictness,
                      double h) {
  if (static_cast<size_t>(batch.n) != labels.size())
    throw std::invalid_argument("gradient_check: batch/label size mismatch");

  // Analytic pass.
  model.zero_grads();
  Tensor probs = model.forward_probs(batch);
  Tensor dprobs(probs.n, probs.c, 1, 1);
  const double inv_n = 1.0 / probs.n;
  for (int n = 0; n < probs.n; ++n) {
    const double* row = probs.data.data() + static_cast<size_t>(n) * probs.c;
    SurrogateResult sr =
        surrogate_loss(kind, std::span<const double>(row, probs.c), labels[n], tax, strictness);
    double* drow = dprobs.data.data() + static_cast<size_t>(n) * probs.c;
    for (int j = 0; j < probs.c; ++j) drow[j] = sr.grad[j] * inv_n;
  }
  model.backward_from_probs(probs, dprobs);

  double worst = 0;
  auto params = model.params();
  auto grads = model.grads();
  for (size_t p = 0; p < params.size(); ++p) {
    for (size_t i = 0; i < params[p]->size(); ++i) {
      double& w = params[p]->data[i];
      const double saved = w;
      w = saved + h;
      double up = batch_loss(model, batch, labels, kind, tax, strictness);
      w = saved - h;
      double down = batch_loss(model, batch, labels, kind, tax, strictness);
      w = saved;
      double gn = (up - down) / (2 * h);
      double ga = grads[p]->data[i];
      double rel = std::abs(ga - gn) / std::max(1e-8, std::abs(ga) + std::abs(gn));
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace cropweed
