#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cropweed/genotype.hpp"
#include "cropweed/objectives.hpp"
#include "cropweed/rng.hpp"
#include "cropweed/tensor.hpp"

namespace cropweed {

// One differentiable stage. forward() caches whatever backward() needs;
// backward() consumes dL/dy, accumulates parameter gradients and returns
// dL/dx. Parameter/gradient tensors are exposed flat for the optimizer and
// for persistence (layer order defines the weight-file layout).
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& x) = 0;
  virtual Tensor backward(const Tensor& dy) = 0;
  virtual std::vector<Tensor*> params() { return {}; }
  virtual std::vector<Tensor*> grads() { return {}; }
  virtual void init_weights(Rng&) {}
  virtual std::string describe() const = 0;
};

// Stride-1 same-padding convolution; dilation via a-trous tap spacing, so
// spatial dims are always preserved.
class Conv2d : public Layer {
 public:
  Conv2d(int in_ch, int out_ch, int kernel, int dilation = 1);
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;
  std::vector<Tensor*> params() override { return {&weight_, &bias_}; }
  std::vector<Tensor*> grads() override { return {&dweight_, &dbias_}; }
  void init_weights(Rng& rng) override;
  std::string describe() const override;

  int in_ch_, out_ch_, kernel_, dilation_, pad_;
  Tensor weight_;   // (out_ch, in_ch, k, k)
  Tensor bias_;     // (out_ch, 1, 1, 1)
  Tensor dweight_, dbias_;

 private:
  Tensor x_;  // cached input
};

class ReLU : public Layer {
 public:
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;
  std::string describe() const override { return "relu"; }

 private:
  Tensor x_;
};

// 2x2 stride-2 max pool; even input dims required. Backward routes gradient
// only to the argmax position of each window (first-in-scan-order on ties).
class MaxPool2 : public Layer {
 public:
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;
  std::string describe() const override { return "maxpool2"; }

 private:
  std::vector<int32_t> argmax_;  // flat input index per output cell
  int in_h_ = 0, in_w_ = 0, channels_ = 0;
};

class Flatten : public Layer {
 public:
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;
  std::string describe() const override { return "flatten"; }

 private:
  int c_ = 0, h_ = 0, w_ = 0;
};

class Dense : public Layer {
 public:
  Dense(int in_features, int out_features);
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;
  std::vector<Tensor*> params() override { return {&weight_, &bias_}; }
  std::vector<Tensor*> grads() override { return {&dweight_, &dbias_}; }
  void init_weights(Rng& rng) override;
  std::string describe() const override;

  int in_f_, out_f_;
  Tensor weight_;  // (out_f, in_f, 1, 1)
  Tensor bias_;    // (out_f, 1, 1, 1)
  Tensor dweight_, dbias_;

 private:
  Tensor x_;
};

struct TrainingMeta {
  ObjectiveKind objective = ObjectiveKind::CCE;
  int epochs = 0;
  uint64_t seed = 0;
};

// A layer stack ending in a Dense head; softmax lives in forward_probs /
// backward_from_probs so losses can work on probabilities.
struct Model {
  Genotype genotype;
  int head_classes = 0;
  int input_side = 0;
  std::vector<std::unique_ptr<Layer>> layers;
  TrainingMeta meta;

  // Logits for a batch; input (N, C, S, S) in NCHW with values in [0,1].
  Tensor forward_logits(const Tensor& x);
  // Softmax probabilities, shape (N, head_classes, 1, 1); rows sum to 1.
  Tensor forward_probs(const Tensor& x);
  // Backprop from dL/dprobs through softmax and all layers; fills grads.
  void backward_from_probs(const Tensor& probs, const Tensor& dprobs);

  std::vector<Tensor*> params();
  std::vector<Tensor*> grads();
  void zero_grads();
  long long num_params();
};

Tensor softmax_rows(const Tensor& logits);

// Builds the family recipe, validates the 300k budget (errors naming the
// count) and He-uniform-initializes every layer from the seed.
Model realize(const Genotype& g, int head_classes, uint64_t seed, int input_side = 64);

}  // namespace cropweed
