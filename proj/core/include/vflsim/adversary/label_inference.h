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

#ifndef VFLSIM_ADVERSARY_LABEL_INFERENCE_H_
#define VFLSIM_ADVERSARY_LABEL_INFERENCE_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "vflsim/adversary/auxiliary_set.h"
#include "vflsim/nn/dense_net.h"
#include "vflsim/nn/matrix.h"

namespace vflsim {

// Label id for samples the surrogate does not confidently place in any known
// class. Outside every valid class range.
inline constexpr int kUnrecognized = -1;

// The adversary's stand-in for the server's top model, trained on its own
// embeddings of auxiliary data. Output unit j scores known_classes[j].
struct SurrogateModel {
  DenseNet net;
  std::vector<int> known_classes;
};

struct SurrogateOptions {
  std::vector<std::size_t> hidden = {32};
  std::size_t epochs = 200;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
};

struct SurrogateFit {
  SurrogateModel model;
  double aux_accuracy = 0.0;
};

// Full-batch softmax-regression training of a fresh perceptron on
// (bottom(aux sample), aux label). The bottom model is not modified.
SurrogateFit TrainSurrogate(const DenseNet& bottom, const AuxiliarySet& aux,
                            const SurrogateOptions& options);

struct LabelEstimates {
  std::vector<int> labels;  // class id or kUnrecognized, per training row
};

// Argmax over the known classes. When the known set is a strict subset of the
// `num_classes` labels, rows whose top softmax probability falls below
// `min_confidence` become kUnrecognized.
LabelEstimates InferLabels(const SurrogateModel& surrogate,
                           const DenseNet& bottom, const RealMatrix& rows,
                           int num_classes, double min_confidence = 0.5);

// Per-row majority over attackers; ties go to the lowest id, and
// kUnrecognized votes like any other label.
LabelEstimates VoteLabels(std::span<const LabelEstimates> votes);

}  // namespace vflsim

#endif  // VFLSIM_ADVERSARY_LABEL_INFERENCE_H_
