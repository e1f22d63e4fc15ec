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

#ifndef VFLSIM_VFL_PROTOCOL_H_
#define VFLSIM_VFL_PROTOCOL_H_

#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "vflsim/adversary/trigger.h"
#include "vflsim/defense/defense.h"
#include "vflsim/nn/dense_net.h"
#include "vflsim/nn/matrix.h"
#include "vflsim/vfl/feature_shard.h"
#include "vflsim/vfl/participant.h"

namespace vflsim {

// The label-hosting party. Labels are only reachable through this type.
class Server {
 public:
  // learning_rate 0 freezes every model; rounds still produce full traces.
  Server(DenseNet top, std::vector<int> labels, int num_classes,
         double learning_rate, DefenseConfig defense = {});

  const DenseNet& top() const { return top_; }
  DenseNet& mutable_top() { return top_; }
  const std::vector<int>& labels() const { return labels_; }
  int num_classes() const { return num_classes_; }
  double learning_rate() const { return learning_rate_; }
  const DefenseConfig& defense() const { return defense_; }

 private:
  friend class RoundRunner;

  DenseNet top_;
  std::vector<int> labels_;
  int num_classes_;
  double learning_rate_;
  DefenseConfig defense_;
  std::mt19937_64 noise_rng_;
  std::mt19937_64 forest_rng_;
  ClassAnomalyFilter filter_;
  std::size_t rounds_seen_ = 0;
};

struct RoundTrace {
  std::size_t round = 0;
  std::vector<RealMatrix> embeddings;  // E_i as submitted, per participant
  std::vector<RealMatrix> gradients;   // d loss / d E_i returned, per participant
  std::vector<std::size_t> excluded;   // batch positions dropped by the filter
  double loss = 0.0;
};

// Columns ordered by ascending participant id.
RealMatrix ConcatEmbeddings(std::span<const std::pair<int, RealMatrix>> batches);

// Inverse of ConcatEmbeddings for the given per-participant widths.
std::vector<RealMatrix> SplitEmbeddingColumns(const RealMatrix& joined,
                                              std::span<const std::size_t> widths);

// One protocol step on `batch_ids`: bottom forwards, concatenation, server
// defenses, top forward, loss, top update, gradient routing and bottom
// updates, in that order. Gradients sent back are taken from the same
// backward pass that produced the top update (pre-update parameters).
RoundTrace RunTrainingRound(Server& server, std::span<Participant> participants,
                            std::span<const std::size_t> batch_ids,
                            const PoisonHook& poison_hook = {});

// Logits of the joint model on per-participant inputs (raw embeddings, no
// defense transforms).
RealMatrix JointLogits(const Server& server,
                       std::span<const Participant> participants,
                       std::span<const RealMatrix> inputs);
std::vector<int> PredictJoint(const Server& server,
                              std::span<const Participant> participants,
                              std::span<const RealMatrix> inputs);

struct MainTaskMetrics {
  double accuracy = 0.0;
  double precision = 0.0;  // macro over classes with support
  double recall = 0.0;     // macro over classes with support
};

MainTaskMetrics ClassificationMetrics(std::span<const int> predicted,
                                      std::span<const int> truth,
                                      int num_classes);

MainTaskMetrics EvaluateMainTask(const Server& server,
                                 std::span<const Participant> participants,
                                 std::span<const RealMatrix> test_inputs,
                                 std::span<const int> test_labels);

// Share of source-class samples predicted as target.
double ConfusionRate(std::span<const int> predicted, std::span<const int> truth,
                     int source, int target);

// Applies every trigger to its participant's slice of the source-class test
// samples and returns the share predicted as `target`.
double EvaluateAsr(const Server& server, std::span<const Participant> participants,
                   std::span<const RealMatrix> test_inputs,
                   std::span<const int> test_labels,
                   std::span<const PlacedTrigger> triggers, int source,
                   int target);

}  // namespace vflsim

#endif  // VFLSIM_VFL_PROTOCOL_H_
