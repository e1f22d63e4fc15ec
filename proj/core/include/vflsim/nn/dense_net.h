// Copyright 2026 The vflsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef VFLSIM_NN_DENSE_NET_H_
#define VFLSIM_NN_DENSE_NET_H_

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "vflsim/nn/matrix.h"

namespace vflsim {

enum class Activation { kIdentity, kRelu };

struct DenseLayer {
  RealMatrix weight;  // out x in
  std::vector<double> bias;
  Activation activation = Activation::kIdentity;

  std::size_t in_dim() const { return weight.cols(); }
  std::size_t out_dim() const { return weight.rows(); }
  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

// Multilayer perceptron. Used for bottom models, the server's top model and
// the adversary's surrogate alike.
class DenseNet {
 public:
  DenseNet() = default;
  // Throws std::invalid_argument if adjacent layer dimensions do not chain.
  explicit DenseNet(std::vector<DenseLayer> layers);

  // ReLU hidden layers, identity output. `dims` = {in, h1, ..., out}.
  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static DenseNet Glorot(std::span<const std::size_t> dims, std::mt19937_64& rng);

  // Layers of `first` followed by layers of `second`.
  static DenseNet Compose(const DenseNet& first, const DenseNet& second);

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::size_t num_layers() const { return layers_.size(); }
  std::size_t num_parameters() const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }

  bool AllFinite() const;

  friend bool operator==(const DenseNet&, const DenseNet&) = default;

 private:
  std::vector<DenseLayer> layers_;
};

// outputs[0] is the batch itself; outputs[l + 1] is the post-activation output
// of layer l. The final entry is the network output.
struct Activations {
  std::vector<RealMatrix> outputs;
  const RealMatrix& output() const { return outputs.back(); }
};

struct LayerGrad {
  RealMatrix weight;
  std::vector<double> bias;
};
using ParamGrads = std::vector<LayerGrad>;

struct BackwardResult {
  ParamGrads param_grads;
  RealMatrix input_grad;
};

struct LossAndGrad {
  double loss = 0.0;
  RealMatrix grad;  // d loss / d logits
};

Activations Forward(const DenseNet& net, const RealMatrix& batch);

// Reverse-mode pass for the activations produced by Forward(net, ...).
BackwardResult Backward(const DenseNet& net, const Activations& activations,
                        const RealMatrix& grad_at_output);

RealMatrix Softmax(const RealMatrix& logits);

// Mean softmax cross-entropy over the batch and its gradient
// (softmax - onehot) / batch_size.
LossAndGrad CrossEntropyWithGrad(const RealMatrix& logits,
                                 std::span<const int> labels);

// p <- p - lr * g for every parameter. lr must be positive.
DenseNet SgdStep(const DenseNet& net, const ParamGrads& grads, double lr);
void SgdStepInPlace(DenseNet& net, const ParamGrads& grads, double lr);

// Row-wise argmax; ties resolve to the lowest class index.
std::vector<int> ArgmaxRows(const RealMatrix& scores);

struct SaliencyMap {
  std::vector<double> values;  // one nonnegative entry per input feature
};

// |d CE(net(sample), label) / d sample| elementwise.
SaliencyMap InputSaliency(const DenseNet& net, std::span<const double> sample,
                          int label);

}  // namespace vflsim

#endif  // VFLSIM_NN_DENSE_NET_H_
