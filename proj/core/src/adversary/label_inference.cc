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

#include "vflsim/adversary/label_inference.h"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "vflsim/common/random.h"

namespace vflsim {

SurrogateFit TrainSurrogate(const DenseNet& bottom, const AuxiliarySet& aux,
                            const SurrogateOptions& options) {
  if (aux.labels.empty()) {
    throw std::invalid_argument("TrainSurrogate: empty auxiliary set");
  }
  if (aux.known_classes.size() < 2) {
    throw std::invalid_argument(
        "TrainSurrogate: auxiliary set covers fewer than 2 classes");
  }
  std::map<int, int> output_of;
  for (std::size_t j = 0; j < aux.known_classes.size(); ++j) {
    output_of[aux.known_classes[j]] = static_cast<int>(j);
  }
  std::vector<int> targets;
  targets.reserve(aux.labels.size());
  for (int y : aux.labels) {
    auto it = output_of.find(y);
    if (it == output_of.end()) {
      throw std::invalid_argument("TrainSurrogate: auxiliary label " +
                                  std::to_string(y) +
                                  " is not in the known class set");
    }
    targets.push_back(it->second);
  }
  if (std::all_of(targets.begin(), targets.end(),
                  [&](int t) { return t == targets.front(); })) {
    throw std::invalid_argument(
        "TrainSurrogate: auxiliary labels contain a single class");
  }

  const RealMatrix embeddings = Forward(bottom, aux.samples).output();
  std::vector<std::size_t> dims = {embeddings.cols()};
  dims.insert(dims.end(), options.hidden.begin(), options.hidden.end());
  dims.push_back(aux.known_classes.size());
  std::mt19937_64 rng = MakeStream(options.seed, "surrogate/init");

  SurrogateFit fit;
  fit.model.known_classes = aux.known_classes;
  fit.model.net = DenseNet::Glorot(dims, rng);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    const Activations acts = Forward(fit.model.net, embeddings);
    const LossAndGrad lg = CrossEntropyWithGrad(acts.output(), targets);
    const BackwardResult back = Backward(fit.model.net, acts, lg.grad);
    SgdStepInPlace(fit.model.net, back.param_grads, options.learning_rate);
  }
  const std::vector<int> pred =
      ArgmaxRows(Forward(fit.model.net, embeddings).output());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    correct += pred[i] == targets[i] ? 1 : 0;
  }
  fit.aux_accuracy = static_cast<double>(correct) / static_cast<double>(pred.size());
  return fit;
}

LabelEstimates InferLabels(const SurrogateModel& surrogate,
                           const DenseNet& bottom, const RealMatrix& rows,
                           int num_classes, double min_confidence) {
  const RealMatrix logits =
      Forward(surrogate.net, Forward(bottom, rows).output()).output();
  const RealMatrix probs = Softmax(logits);
  const std::vector<int> best = ArgmaxRows(logits);
  const bool partial =
      surrogate.known_classes.size() < static_cast<std::size_t>(num_classes);
  LabelEstimates out;
  out.labels.reserve(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    const auto j = static_cast<std::size_t>(best[i]);
    if (partial && probs(i, j) < min_confidence) {
      out.labels.push_back(kUnrecognized);
    } else {
      out.labels.push_back(surrogate.known_classes[j]);
    }
  }
  return out;
}

LabelEstimates VoteLabels(std::span<const LabelEstimates> votes) {
  if (votes.empty()) {
    throw std::invalid_argument("VoteLabels: no votes");
  }
  const std::size_t n = votes.front().labels.size();
  for (const auto& v : votes) {
    if (v.labels.size() != n) {
      throw std::invalid_argument("VoteLabels: estimate lengths differ (" +
                                  std::to_string(n) + " vs " +
                                  std::to_string(v.labels.size()) + ")");
    }
  }
  LabelEstimates out;
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::map<int, int> tally;  // ordered: first max is the lowest id
    for (const auto& v : votes) ++tally[v.labels[i]];
    int best = tally.begin()->first;
    int best_count = 0;
    for (const auto& [label, count] : tally) {
      if (count > best_count) {
        best = label;
        best_count = count;
      }
    }
    out.labels[i] = best;
  }
  return out;
}

}  // namespace vflsim
