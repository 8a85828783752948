#include "cropweed/train.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "cropweed/image.hpp"
#include "cropweed/png_io.hpp"
#include "cropweed/rng.hpp"

namespace cropweed {

void TrainConfig::validate() const {
  if (input_side < 2) throw std::invalid_argument("train config: input_side must be >= 2");
  if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be positive");
  if (epochs < 1) throw std::invalid_argument("train config: epochs must be positive");
  if (learning_rate < 0) throw std::invalid_argument("train config: learning_rate must be >= 0");
  if (momentum < 0 || momentum >= 1)
    throw std::invalid_argument("train config: momentum must be in [0,1)");
}

TensorDataset load_tensor_dataset(const Dataset& ds, int side) {
  if (side < 2) throw std::invalid_argument("load_tensor_dataset: side must be >= 2");
  TensorDataset out;
  out.taxonomy = ds.taxonomy;
  out.side = side;
  out.images.reserve(ds.samples.size());
  for (size_t i = 0; i < ds.samples.size(); ++i) {
    const Sample& s = ds.samples[i];
    RgbImage img = read_png(s.image_path);
    if (img.width != side || img.height != side) img = resize_bilinear(img, side, side);
    Tensor t(1, 3, side, side);
    for (int c = 0; c < 3; ++c) {
      double* plane = t.channel(0, c);
      for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x)
          plane[y * side + x] = img.pixels[(static_cast<size_t>(y) * side + x) * 3 + c] / 255.0;
    }
    out.images.push_back(std::move(t));
    int label = ds.label_of(i);
    if (label < 0)
      throw std::runtime_error("load_tensor_dataset: category '" + s.category +
                               "' missing from the taxonomy");
    out.labels.push_back(label);
  }
  return out;
}

namespace {

Tensor gather_batch(const TensorDataset& ds, const std::vector<size_t>& order, size_t begin,
                    size_t end) {
  const int side = ds.side;
  Tensor batch(static_cast<int>(end - begin), 3, side, side);
  const size_t per = batch.data.size() / batch.n;
  for (size_t i = begin; i < end; ++i)
    std::copy(ds.images[order[i]].data.begin(), ds.images[order[i]].data.end(),
              batch.data.begin() + (i - begin) * per);
  return batch;
}

}  // namespace

LabelVector predict(Model& model, const TensorDataset& ds, int batch_size) {
  LabelVector preds;
  preds.reserve(ds.size());
  std::vector<size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  for (size_t at = 0; at < ds.size(); at += batch_size) {
    size_t end = std::min(ds.size(), at + batch_size);
    Tensor probs = model.forward_probs(gather_batch(ds, order, at, end));
    for (int n = 0; n < probs.n; ++n) {
      const double* row = probs.data.data() + static_cast<size_t>(n) * probs.c;
      preds.push_back(static_cast<int>(std::max_element(row, row + probs.c) - row));
    }
  }
  return preds;
}

EpochStats eval_hard_metrics(Model& model, const TensorDataset& ds, int epoch) {
  if (ds.size() == 0) throw std::invalid_argument("eval_hard_metrics: empty dataset");
  LabelVector preds = predict(model, ds);
  EpochStats st;
  st.epoch = epoch;
  st.accuracy = accuracy(ds.labels, preds);
  BitVector bits = nmw_indicator(ds.labels, preds, ds.taxonomy, NmwStrictness::TextIff);
  long long ones = 0;
  for (uint8_t b : bits) ones += b;
  st.nmw = static_cast<double>(ones) / static_cast<double>(bits.size());
  return st;
}

TrainResult train_model(Model& model, const TensorDataset& train, const TensorDataset& val,
                        ObjectiveKind objective, const TrainConfig& cfg,
                        NmwStrictness strictness) {
  cfg.validate();
  if (train.size() == 0 || val.size() == 0)
    throw std::invalid_argument("train_model: empty train or val dataset");
  const int C = train.taxonomy.size();
  if (objective != ObjectiveKind::CCE && model.head_classes != C + 1)
    throw std::invalid_argument(objective_name(objective) +
                                " needs head_classes = C+1 (unknown class); model head is " +
                                std::to_string(model.head_classes) + ", C is " +
                                std::to_string(C));
  if (objective == ObjectiveKind::CCE && model.head_classes < C)
    throw std::invalid_argument("CCE head smaller than the class count");

  std::vector<Tensor*> params = model.params();
  std::vector<Tensor*> grads = model.grads();
  std::vector<Tensor> velocity;
  velocity.reserve(params.size());
  for (Tensor* p : params) velocity.emplace_back(p->n, p->c, p->h, p->w);

  Rng shuffle_rng = make_rng(cfg.seed, "train/shuffle");
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  long long batch_counter = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_vec(order, shuffle_rng);
    for (size_t at = 0; at < train.size(); at += cfg.batch_size) {
      size_t end = std::min(train.size(), at + cfg.batch_size);
      Tensor batch = gather_batch(train, order, at, end);
      ObjectiveKind step_kind =
          objective == ObjectiveKind::DM ? dm_schedule(batch_counter) : objective;
      ++batch_counter;

      Tensor probs = model.forward_probs(batch);
      Tensor dprobs(probs.n, probs.c, 1, 1);
      const double inv_n = 1.0 / probs.n;
      for (int n = 0; n < probs.n; ++n) {
        const double* row = probs.data.data() + static_cast<size_t>(n) * probs.c;
        SurrogateResult sr =
            surrogate_loss(step_kind, std::span<const double>(row, probs.c),
                           train.labels[order[at + n]], train.taxonomy, strictness);
        double* drow = dprobs.data.data() + static_cast<size_t>(n) * probs.c;
        for (int j = 0; j < probs.c; ++j) drow[j] = sr.grad[j] * inv_n;
      }
      model.zero_grads();
      model.backward_from_probs(probs, dprobs);
      for (size_t p = 0; p < params.size(); ++p) {
        double* w = params[p]->data.data();
        const double* g = grads[p]->data.data();
        double* v = velocity[p].data.data();
        const size_t len = params[p]->size();
        for (size_t i = 0; i < len; ++i) {
          v[i] = cfg.momentum * v[i] - cfg.learning_rate * g[i];
          w[i] += v[i];
        }
      }
    }
    result.history.push_back(eval_hard_metrics(model, val, epoch));
  }
  model.meta.objective = objective;
  model.meta.epochs = cfg.epochs;
  model.meta.seed = cfg.seed;
  result.final_accuracy = result.history.back().accuracy;
  result.final_nmw = result.history.back().nmw;
  return result;
}

}  // namespace cropweed
