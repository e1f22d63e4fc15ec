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

#include "vflsim/vfl/protocol.h"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "vflsim/common/random.h"

namespace vflsim {

Server::Server(DenseNet top, std::vector<int> labels, int num_classes,
               double learning_rate, DefenseConfig defense)
    : top_(std::move(top)),
      labels_(std::move(labels)),
      num_classes_(num_classes),
      learning_rate_(learning_rate),
      defense_(defense),
      noise_rng_(MakeStream(defense.seed, "defense/noise")),
      forest_rng_(MakeStream(defense.seed, "defense/forest")) {
  defense_.Validate();
  if (!(learning_rate_ >= 0.0)) {
    throw std::invalid_argument("Server: learning rate must be >= 0");
  }
  if (top_.output_dim() != static_cast<std::size_t>(num_classes_)) {
    throw std::invalid_argument("Server: top model emits " +
                                std::to_string(top_.output_dim()) +
                                " scores for " + std::to_string(num_classes_) +
                                " classes");
  }
  for (int y : labels_) {
    if (y < 0 || y >= num_classes_) {
      throw std::invalid_argument("Server: label " + std::to_string(y) +
                                  " outside [0, " +
                                  std::to_string(num_classes_) + ")");
    }
  }
}

RealMatrix ConcatEmbeddings(std::span<const std::pair<int, RealMatrix>> batches) {
  std::vector<const std::pair<int, RealMatrix>*> order;
  std::set<int> seen;
  for (const auto& b : batches) {
    if (!seen.insert(b.first).second) {
      throw std::invalid_argument("ConcatEmbeddings: duplicate participant id " +
                                  std::to_string(b.first));
    }
    order.push_back(&b);
  }
  std::sort(order.begin(), order.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });
  std::vector<RealMatrix> blocks;
  blocks.reserve(order.size());
  for (const auto* b : order) blocks.push_back(b->second);
  return ConcatColumns(blocks);
}

std::vector<RealMatrix> SplitEmbeddingColumns(const RealMatrix& joined,
                                              std::span<const std::size_t> widths) {
  std::vector<RealMatrix> out;
  std::size_t offset = 0;
  for (std::size_t w : widths) {
    out.push_back(joined.ColumnSlice(offset, offset + w));
    offset += w;
  }
  if (offset != joined.cols()) {
    throw std::invalid_argument("SplitEmbeddingColumns: widths sum to " +
                                std::to_string(offset) + ", matrix has " +
                                std::to_string(joined.cols()) + " columns");
  }
  return out;
}

class RoundRunner {
 public:
  static RoundTrace Run(Server& server, std::span<Participant> participants,
                        std::span<const std::size_t> batch_ids,
                        const PoisonHook& poison_hook) {
    if (participants.empty()) {
      throw std::invalid_argument("RunTrainingRound: no participants");
    }
    for (std::size_t k = 0; k < participants.size(); ++k) {
      if (participants[k].id != static_cast<int>(k)) {
        throw std::invalid_argument(
            "RunTrainingRound: participants must be ordered by id 0..K-1");
      }
    }
    for (std::size_t id : batch_ids) {
      if (id >= server.labels_.size()) {
        throw std::out_of_range("RunTrainingRound: sample id " +
                                std::to_string(id) + " outside [0, " +
                                std::to_string(server.labels_.size()) + ")");
      }
    }
    RoundTrace trace;
    trace.round = server.rounds_seen_++;
    const std::size_t k_count = participants.size();

    // Participants: forward on their own rows.
    std::vector<Activations> bottom_acts;
    bottom_acts.reserve(k_count);
    for (Participant& p : participants) {
      RealMatrix rows = p.shard.rows.GatherRows(batch_ids);
      if (poison_hook && p.role == Role::kAdversary) {
        const std::size_t r = rows.rows();
        const std::size_t c = rows.cols();
        poison_hook(p, batch_ids, rows);
        if (rows.rows() != r || rows.cols() != c) {
          throw std::logic_error("poison hook changed the batch shape");
        }
      }
      bottom_acts.push_back(Forward(p.bottom, rows));
      trace.embeddings.push_back(bottom_acts.back().output());
    }

    // Server: defenses on received embeddings, then concatenation.
    std::vector<RealMatrix> received;
    received.reserve(k_count);
    for (const RealMatrix& e : trace.embeddings) {
      received.push_back(server.defense_.noise_enabled()
                             ? AddDpNoise(e, server.defense_.dp_variance,
                                          server.noise_rng_)
                             : e);
    }
    std::vector<int> batch_labels;
    batch_labels.reserve(batch_ids.size());
    for (std::size_t id : batch_ids) batch_labels.push_back(server.labels_[id]);
    if (server.defense_.filter_enabled()) {
      const bool refit = trace.round % server.defense_.refit_every == 0;
      trace.excluded = server.filter_.Exclude(
          received, batch_labels, server.defense_.anomaly_budget_percent,
          server.defense_.forest, refit, server.forest_rng_);
    }
    std::vector<std::pair<int, RealMatrix>> tagged;
    std::vector<std::size_t> widths;
    for (std::size_t k = 0; k < k_count; ++k) {
      widths.push_back(received[k].cols());
      tagged.emplace_back(participants[k].id, std::move(received[k]));
    }
    RealMatrix joined = ConcatEmbeddings(tagged);

    std::vector<std::size_t> kept;
    if (!trace.excluded.empty()) {
      std::vector<bool> drop(batch_ids.size(), false);
      for (std::size_t pos : trace.excluded) drop[pos] = true;
      for (std::size_t i = 0; i < batch_ids.size(); ++i) {
        if (!drop[i]) kept.push_back(i);
      }
      if (kept.empty()) {
        for (const RealMatrix& e : trace.embeddings) {
          trace.gradients.emplace_back(e.rows(), e.cols());
        }
        return trace;
      }
      joined = joined.GatherRows(kept);
      std::vector<int> kept_labels;
      for (std::size_t i : kept) kept_labels.push_back(batch_labels[i]);
      batch_labels = std::move(kept_labels);
    }

    const Activations top_acts = Forward(server.top_, joined);
    const LossAndGrad lg = CrossEntropyWithGrad(top_acts.output(), batch_labels);
    trace.loss = lg.loss;
    BackwardResult top_back = Backward(server.top_, top_acts, lg.grad);
    const bool update = server.learning_rate_ > 0.0;
    if (update) {
      SgdStepInPlace(server.top_, top_back.param_grads, server.learning_rate_);
    }

    RealMatrix joined_grad = std::move(top_back.input_grad);
    if (!kept.empty()) {
      RealMatrix full(batch_ids.size(), joined_grad.cols());
      for (std::size_t j = 0; j < kept.size(); ++j) {
        std::copy(joined_grad.row(j).begin(), joined_grad.row(j).end(),
                  full.row(kept[j]).begin());
      }
      joined_grad = std::move(full);
    }
    trace.gradients = SplitEmbeddingColumns(joined_grad, widths);

    // Participants: backpropagate the routed gradient into their bottoms.
    for (std::size_t k = 0; k < k_count; ++k) {
      if (!update) break;
      const BackwardResult back =
          Backward(participants[k].bottom, bottom_acts[k], trace.gradients[k]);
      SgdStepInPlace(participants[k].bottom, back.param_grads,
                     server.learning_rate_);
    }
    return trace;
  }
};

RoundTrace RunTrainingRound(Server& server, std::span<Participant> participants,
                            std::span<const std::size_t> batch_ids,
                            const PoisonHook& poison_hook) {
  return RoundRunner::Run(server, participants, batch_ids, poison_hook);
}

RealMatrix JointLogits(const Server& server,
                       std::span<const Participant> participants,
                       std::span<const RealMatrix> inputs) {
  if (inputs.size() != participants.size()) {
    throw std::invalid_argument("JointLogits: " + std::to_string(inputs.size()) +
                                " input blocks for " +
                                std::to_string(participants.size()) +
                                " participants");
  }
  std::vector<std::pair<int, RealMatrix>> tagged;
  for (std::size_t k = 0; k < participants.size(); ++k) {
    tagged.emplace_back(participants[k].id,
                        Forward(participants[k].bottom, inputs[k]).output());
  }
  return Forward(server.top(), ConcatEmbeddings(tagged)).output();
}

std::vector<int> PredictJoint(const Server& server,
                              std::span<const Participant> participants,
                              std::span<const RealMatrix> inputs) {
  return ArgmaxRows(JointLogits(server, participants, inputs));
}

MainTaskMetrics ClassificationMetrics(std::span<const int> predicted,
                                      std::span<const int> truth,
                                      int num_classes) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("ClassificationMetrics: length mismatch");
  }
  if (truth.empty()) {
    throw std::invalid_argument("ClassificationMetrics: empty evaluation set");
  }
  const auto n = static_cast<std::size_t>(num_classes);
  std::vector<std::size_t> tp(n, 0), pred_count(n, 0), support(n, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto y = static_cast<std::size_t>(truth[i]);
    const auto p = static_cast<std::size_t>(predicted[i]);
    ++support[y];
    ++pred_count[p];
    if (y == p) {
      ++tp[y];
      ++correct;
    }
  }
  MainTaskMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  std::size_t classes = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (support[c] == 0) continue;
    ++classes;
    m.recall += static_cast<double>(tp[c]) / static_cast<double>(support[c]);
    if (pred_count[c] > 0) {
      m.precision +=
          static_cast<double>(tp[c]) / static_cast<double>(pred_count[c]);
    }
  }
  m.recall /= static_cast<double>(classes);
  m.precision /= static_cast<double>(classes);
  return m;
}

MainTaskMetrics EvaluateMainTask(const Server& server,
                                 std::span<const Participant> participants,
                                 std::span<const RealMatrix> test_inputs,
                                 std::span<const int> test_labels) {
  if (test_labels.empty()) {
    throw std::invalid_argument("EvaluateMainTask: empty test set");
  }
  const std::vector<int> pred = PredictJoint(server, participants, test_inputs);
  return ClassificationMetrics(pred, test_labels, server.num_classes());
}

double ConfusionRate(std::span<const int> predicted, std::span<const int> truth,
                     int source, int target) {
  std::size_t total = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] != source) continue;
    ++total;
    if (predicted[i] == target) ++hits;
  }
  if (total == 0) {
    throw std::invalid_argument("no samples of source class " +
                                std::to_string(source));
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

double EvaluateAsr(const Server& server, std::span<const Participant> participants,
                   std::span<const RealMatrix> test_inputs,
                   std::span<const int> test_labels,
                   std::span<const PlacedTrigger> triggers, int source,
                   int target) {
  std::vector<std::size_t> source_ids;
  for (std::size_t i = 0; i < test_labels.size(); ++i) {
    if (test_labels[i] == source) source_ids.push_back(i);
  }
  if (source_ids.empty()) {
    throw std::invalid_argument("EvaluateAsr: no test samples of source class " +
                                std::to_string(source));
  }
  std::vector<RealMatrix> inputs;
  for (const RealMatrix& block : test_inputs) {
    inputs.push_back(block.GatherRows(source_ids));
  }
  for (const PlacedTrigger& t : triggers) {
    const auto k = static_cast<std::size_t>(t.participant_id);
    if (k >= participants.size() || participants[k].role != Role::kAdversary) {
      throw std::invalid_argument("EvaluateAsr: trigger for participant " +
                                  std::to_string(t.participant_id) +
                                  " which is not adversary-controlled");
    }
    inputs[k] = ApplyTriggerRows(inputs[k], t.grid, t.spec, t.window);
  }
  const std::vector<int> pred = PredictJoint(server, participants, inputs);
  std::size_t hits = 0;
  for (int p : pred) hits += p == target ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

}  // namespace vflsim
