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

#include "vflsim/nn/dense_net.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vflsim {
namespace {

std::string LayerTag(std::size_t l) { return "layer " + std::to_string(l); }

void CheckGradShapes(const DenseNet& net, const ParamGrads& grads) {
  if (grads.size() != net.num_layers()) {
    throw std::invalid_argument("parameter gradient has " +
                                std::to_string(grads.size()) +
                                " layers, net has " +
                                std::to_string(net.num_layers()));
  }
  for (std::size_t l = 0; l < grads.size(); ++l) {
    const DenseLayer& layer = net.layers()[l];
    RequireSameShape(layer.weight, grads[l].weight, "SgdStep weight");
    if (grads[l].bias.size() != layer.bias.size()) {
      throw std::invalid_argument("SgdStep: bias size mismatch at " +
                                  LayerTag(l));
    }
  }
}

}  // namespace

DenseNet::DenseNet(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].bias.size() != layers_[l].out_dim()) {
      throw std::invalid_argument("DenseNet: bias length " +
                                  std::to_string(layers_[l].bias.size()) +
                                  " != output width " +
                                  std::to_string(layers_[l].out_dim()) +
                                  " at " + LayerTag(l));
    }
    if (l > 0 && layers_[l].in_dim() != layers_[l - 1].out_dim()) {
      throw std::invalid_argument(
          "DenseNet: " + LayerTag(l) + " expects input width " +
          std::to_string(layers_[l].in_dim()) + " but previous layer emits " +
          std::to_string(layers_[l - 1].out_dim()));
    }
  }
}

DenseNet DenseNet::Glorot(std::span<const std::size_t> dims,
                          std::mt19937_64& rng) {
  if (dims.size() < 2) {
    throw std::invalid_argument("DenseNet::Glorot needs at least in/out dims");
  }
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::size_t in = dims[l];
    const std::size_t out = dims[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer layer;
    layer.weight = RealMatrix(out, in);
    for (double& w : layer.weight.values()) w = dist(rng);
    layer.bias.assign(out, 0.0);
    layer.activation =
        l + 2 == dims.size() ? Activation::kIdentity : Activation::kRelu;
    layers.push_back(std::move(layer));
  }
  return DenseNet(std::move(layers));
}

DenseNet DenseNet::Compose(const DenseNet& first, const DenseNet& second) {
  std::vector<DenseLayer> layers = first.layers();
  layers.insert(layers.end(), second.layers().begin(), second.layers().end());
  return DenseNet(std::move(layers));
}

std::size_t DenseNet::input_dim() const {
  return layers_.empty() ? 0 : layers_.front().in_dim();
}

std::size_t DenseNet::output_dim() const {
  return layers_.empty() ? 0 : layers_.back().out_dim();
}

std::size_t DenseNet::num_parameters() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

bool DenseNet::AllFinite() const {
  for (const auto& l : layers_) {
    if (!l.weight.AllFinite()) return false;
    for (double b : l.bias) {
      if (!std::isfinite(b)) return false;
    }
  }
  return true;
}

Activations Forward(const DenseNet& net, const RealMatrix& batch) {
  if (net.num_layers() == 0) {
    throw std::invalid_argument("Forward: empty network");
  }
  if (batch.cols() != net.input_dim()) {
    throw std::invalid_argument("Forward: batch " + batch.ShapeString() +
                                " does not match net input width " +
                                std::to_string(net.input_dim()));
  }
  Activations acts;
  acts.outputs.reserve(net.num_layers() + 1);
  acts.outputs.push_back(batch);
  for (const DenseLayer& layer : net.layers()) {
    const RealMatrix& x = acts.outputs.back();
    const std::size_t n = x.rows();
    const std::size_t in = layer.in_dim();
    const std::size_t out = layer.out_dim();
    RealMatrix z(n, out);
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = x.row(i).data();
      double* zi = z.row(i).data();
      for (std::size_t o = 0; o < out; ++o) {
        const double* wo = layer.weight.row(o).data();
        double s = layer.bias[o];
        for (std::size_t k = 0; k < in; ++k) s += wo[k] * xi[k];
        zi[o] = layer.activation == Activation::kRelu ? std::max(s, 0.0) : s;
      }
    }
    acts.outputs.push_back(std::move(z));
  }
  return acts;
}

BackwardResult Backward(const DenseNet& net, const Activations& activations,
                        const RealMatrix& grad_at_output) {
  if (activations.outputs.size() != net.num_layers() + 1) {
    throw std::invalid_argument("Backward: activations do not belong to net");
  }
  RequireSameShape(activations.output(), grad_at_output, "Backward");
  BackwardResult result;
  result.param_grads.resize(net.num_layers());
  RealMatrix grad = grad_at_output;
  for (std::size_t l = net.num_layers(); l-- > 0;) {
    const DenseLayer& layer = net.layers()[l];
    const RealMatrix& x = activations.outputs[l];
    const RealMatrix& y = activations.outputs[l + 1];
    const std::size_t n = x.rows();
    const std::size_t in = layer.in_dim();
    const std::size_t out = layer.out_dim();
    if (layer.activation == Activation::kRelu) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t o = 0; o < out; ++o) {
          if (!(y(i, o) > 0.0)) grad(i, o) = 0.0;
        }
      }
    }
    LayerGrad& g = result.param_grads[l];
    g.weight = RealMatrix(out, in);
    g.bias.assign(out, 0.0);
    RealMatrix grad_in(n, in);
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = x.row(i).data();
      double* gxi = grad_in.row(i).data();
      for (std::size_t o = 0; o < out; ++o) {
        const double go = grad(i, o);
        if (go == 0.0) continue;
        g.bias[o] += go;
        double* gw = g.weight.row(o).data();
        const double* w = layer.weight.row(o).data();
        for (std::size_t k = 0; k < in; ++k) {
          gw[k] += go * xi[k];
          gxi[k] += go * w[k];
        }
      }
    }
    grad = std::move(grad_in);
  }
  result.input_grad = std::move(grad);
  return result;
}

RealMatrix Softmax(const RealMatrix& logits) {
  RealMatrix p(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto in = logits.row(i);
    auto out = p.row(i);
    const double mx = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      out[c] = std::exp(in[c] - mx);
      total += out[c];
    }
    for (double& v : out) v /= total;
  }
  return p;
}

LossAndGrad CrossEntropyWithGrad(const RealMatrix& logits,
                                 std::span<const int> labels) {
  if (labels.size() != logits.rows()) {
    throw std::invalid_argument("CrossEntropyWithGrad: " +
                                std::to_string(labels.size()) +
                                " labels for logits " + logits.ShapeString());
  }
  if (logits.rows() == 0) {
    throw std::invalid_argument("CrossEntropyWithGrad: empty batch");
  }
  const int num_classes = static_cast<int>(logits.cols());
  LossAndGrad out;
  out.grad = RealMatrix(logits.rows(), logits.cols());
  const double inv_n = 1.0 / static_cast<double>(logits.rows());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const int y = labels[i];
    if (y < 0 || y >= num_classes) {
      throw std::invalid_argument("CrossEntropyWithGrad: label " +
                                  std::to_string(y) + " at row " +
                                  std::to_string(i) + " outside [0, " +
                                  std::to_string(num_classes) + ")");
    }
    auto z = logits.row(i);
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - mx);
    const double log_sum = std::log(sum);
    total += -(z[y] - mx - log_sum);
    auto g = out.grad.row(i);
    for (int c = 0; c < num_classes; ++c) {
      const double p = std::exp(z[c] - mx - log_sum);
      g[c] = (p - (c == y ? 1.0 : 0.0)) * inv_n;
    }
  }
  out.loss = total * inv_n;
  return out;
}

void SgdStepInPlace(DenseNet& net, const ParamGrads& grads, double lr) {
  if (!(lr > 0.0)) {
    throw std::invalid_argument("SgdStep: learning rate must be positive, got " +
                                std::to_string(lr));
  }
  CheckGradShapes(net, grads);
  for (std::size_t l = 0; l < grads.size(); ++l) {
    DenseLayer& layer = net.mutable_layers()[l];
    auto w = layer.weight.values();
    auto gw = grads[l].weight.values();
    for (std::size_t k = 0; k < w.size(); ++k) w[k] -= lr * gw[k];
    for (std::size_t o = 0; o < layer.bias.size(); ++o) {
      layer.bias[o] -= lr * grads[l].bias[o];
    }
  }
}

DenseNet SgdStep(const DenseNet& net, const ParamGrads& grads, double lr) {
  DenseNet updated = net;
  SgdStepInPlace(updated, grads, lr);
  return updated;
}

std::vector<int> ArgmaxRows(const RealMatrix& scores) {
  std::vector<int> out(scores.rows(), 0);
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    auto r = scores.row(i);
    out[i] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return out;
}

SaliencyMap InputSaliency(const DenseNet& net, std::span<const double> sample,
                          int label) {
  if (sample.size() != net.input_dim()) {
    throw std::invalid_argument("InputSaliency: sample width " +
                                std::to_string(sample.size()) +
                                " != net input width " +
                                std::to_string(net.input_dim()));
  }
  RealMatrix x(1, sample.size(),
               std::vector<double>(sample.begin(), sample.end()));
  const Activations acts = Forward(net, x);
  const int labels[] = {label};
  const LossAndGrad lg = CrossEntropyWithGrad(acts.output(), labels);
  const BackwardResult back = Backward(net, acts, lg.grad);
  SaliencyMap map;
  map.values.resize(sample.size());
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const double g = back.input_grad(0, k);
    if (!std::isfinite(g)) {
      throw std::runtime_error("InputSaliency: non-finite gradient at feature " +
                               std::to_string(k));
    }
    map.values[k] = std::abs(g);
  }
  return map;
}

}  // namespace vflsim
