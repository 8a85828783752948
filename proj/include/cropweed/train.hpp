#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cropweed/dataset.hpp"
#include "cropweed/model.hpp"
#include "cropweed/objectives.hpp"
#include "cropweed/tensor.hpp"

namespace cropweed {

struct TrainConfig {
  int input_side = 64;
  int batch_size = 32;
  int epochs = 64;
  double learning_rate = 0.01;
  double momentum = 0.9;
  uint64_t seed = 0;

  // learning_rate 0 is allowed (a zero step is a legitimate degenerate run);
  // everything else must be positive.
  void validate() const;
};

// A dataset decoded to model input: one NCHW tensor per sample, [0,1]
// scaled, plus its label and the taxonomy that interprets labels.
struct TensorDataset {
  std::vector<Tensor> images;  // each (1, 3, side, side)
  LabelVector labels;
  Taxonomy taxonomy;
  int side = 0;

  size_t size() const { return images.size(); }
};

// Reads every manifest sample, bilinear-resizes to side x side and scales
// to [0,1].
TensorDataset load_tensor_dataset(const Dataset& ds, int side = 64);

struct EpochStats {
  int epoch = 0;       // 1-based
  double accuracy = 0; // hard val Accuracy
  double nmw = 0;      // hard val NMW (text_iff mean)
};

struct TrainResult {
  std::vector<EpochStats> history;
  double final_accuracy = 0;
  double final_nmw = 0;
};

// Mini-batch SGD with momentum. DM alternates CCE/NMW per batch via
// dm_schedule over a counter that spans epochs. Deterministic for a fixed
// seed (single-threaded; per-epoch shuffles come from one seeded stream).
TrainResult train_model(Model& model, const TensorDataset& train, const TensorDataset& val,
                        ObjectiveKind objective, const TrainConfig& cfg,
                        NmwStrictness strictness = NmwStrictness::TextIff);

// Argmax predictions over a whole dataset (batched internally).
LabelVector predict(Model& model, const TensorDataset& ds, int batch_size = 32);

// Hard metrics of a model on a dataset; predictions with index C map to the
// taxonomy's unknown class.
EpochStats eval_hard_metrics(Model& model, const TensorDataset& ds, int epoch = 0);

}  // namespace cropweed
