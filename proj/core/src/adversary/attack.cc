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

#include "vflsim/adversary/attack.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "vflsim/common/random.h"

namespace vflsim {
namespace {

std::vector<double> MeanSaliency(const DenseNet& classifier,
                                 const RealMatrix& rows,
                                 std::span<const std::size_t> ids) {
  std::vector<double> mean(rows.cols(), 0.0);
  if (ids.empty()) return mean;
  for (std::size_t id : ids) {
    auto x = rows.row(id);
    RealMatrix one(1, x.size(), std::vector<double>(x.begin(), x.end()));
    const int label = ArgmaxRows(Forward(classifier, one).output())[0];
    const SaliencyMap map = InputSaliency(classifier, x, label);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += map.values[k];
  }
  for (double& v : mean) v /= static_cast<double>(ids.size());
  return mean;
}

}  // namespace

void AttackSchedule::Validate() const {
  if (!(attack_round > 0 && attack_round < total_rounds)) {
    throw std::invalid_argument("attack.attack_round must satisfy 0 < R_n < " +
                                std::to_string(total_rounds) + ", got " +
                                std::to_string(attack_round));
  }
  if (!(budget_percent >= 0.0 && budget_percent <= 100.0)) {
    throw std::invalid_argument("attack.budget_percent must be in [0, 100]");
  }
  if (epsilon && !(*epsilon >= 0.0)) {
    throw std::invalid_argument("attack.epsilon must be >= 0");
  }
  if (!(epsilon_fraction >= 0.0)) {
    throw std::invalid_argument("attack.epsilon_fraction must be >= 0");
  }
  if (refresh == 0) {
    throw std::invalid_argument("attack.refresh must be >= 1");
  }
  if (!(poison_learning_rate > 0.0)) {
    throw std::invalid_argument("attack.poison_learning_rate must be > 0");
  }
  if (!(surrogate.learning_rate > 0.0)) {
    throw std::invalid_argument("attack.surrogate_learning_rate must be > 0");
  }
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
    throw std::invalid_argument("attack.min_confidence must be in [0, 1]");
  }
}

AttackCoordinator::AttackCoordinator(AttackSchedule schedule,
                                     TriggerSpec trigger,
                                     std::vector<AttackerKit> kits,
                                     int num_classes, std::uint64_t seed)
    : schedule_(std::move(schedule)),
      trigger_(std::move(trigger)),
      kits_(std::move(kits)),
      num_classes_(num_classes),
      rng_(MakeStream(seed, "adversary")) {
  schedule_.Validate();
  if (kits_.empty()) {
    throw std::invalid_argument("AttackCoordinator: no attackers");
  }
  std::sort(kits_.begin(), kits_.end(),
            [](const auto& a, const auto& b) { return a.participant_id < b.participant_id; });
}

const Participant& AttackCoordinator::Own(
    std::span<const Participant* const> attackers, int id) const {
  for (const Participant* p : attackers) {
    if (p->id == id) {
      if (p->role != Role::kAdversary) {
        throw std::invalid_argument("participant " + std::to_string(id) +
                                    " is not adversary-controlled");
      }
      return *p;
    }
  }
  throw std::invalid_argument("attacker " + std::to_string(id) +
                              " was not handed its participant record");
}

void AttackCoordinator::BeginBackdoor(
    std::size_t round, std::span<const Participant* const> attackers) {
  if (round != schedule_.attack_round) {
    throw std::logic_error("BeginBackdoor at round " + std::to_string(round) +
                           ", schedule says " +
                           std::to_string(schedule_.attack_round));
  }
  if (attackers.size() != kits_.size()) {
    throw std::invalid_argument("BeginBackdoor: expected " +
                                std::to_string(kits_.size()) +
                                " attacker records, got " +
                                std::to_string(attackers.size()));
  }
  for (const Participant* p : attackers) {
    if (p->role != Role::kAdversary) {
      throw std::invalid_argument("BeginBackdoor: participant " +
                                  std::to_string(p->id) +
                                  " is not adversary-controlled");
    }
  }

  // Step 1: label inference per attacker, then consensus.
  states_.clear();
  std::vector<LabelEstimates> votes;
  for (const AttackerKit& kit : kits_) {
    const Participant& self = Own(attackers, kit.participant_id);
    AttackerState state;
    state.participant_id = kit.participant_id;
    SurrogateOptions opts = schedule_.surrogate;
    opts.seed = opts.seed ^ static_cast<std::uint64_t>(kit.participant_id);
    state.surrogate = TrainSurrogate(self.bottom, kit.aux, opts);
    state.own_estimates =
        InferLabels(state.surrogate.model, self.bottom, self.shard.rows,
                    num_classes_, schedule_.min_confidence);
    votes.push_back(state.own_estimates);
    states_.push_back(std::move(state));
  }
  estimates_ = votes.size() == 1 ? votes.front() : VoteLabels(votes);

  // Step 2.1: class pair over the colluders' joint embedding.
  std::vector<RealMatrix> blocks;
  for (const AttackerState& s : states_) {
    const Participant& self = Own(attackers, s.participant_id);
    blocks.push_back(Forward(self.bottom, self.shard.rows).output());
  }
  pair_ = SelectClasses(schedule_.selection, ConcatColumns(blocks), estimates_,
                        rng_);

  source_rows_.clear();
  std::vector<std::size_t> target_rows;
  for (std::size_t i = 0; i < estimates_.labels.size(); ++i) {
    if (estimates_.labels[i] == pair_.source) source_rows_.push_back(i);
    if (estimates_.labels[i] == pair_.target) target_rows.push_back(i);
  }
  std::shuffle(source_rows_.begin(), source_rows_.end(), rng_);

  // Step 2.2: trigger pieces and placement.
  std::vector<TriggerSpec> pieces;
  if (trigger_.mode == TriggerMode::kGridPatch) {
    pieces = SplitTrigger(trigger_, states_.size());
  } else {
    pieces.assign(states_.size(), trigger_);
  }
  for (std::size_t a = 0; a < states_.size(); ++a) {
    PlaceTrigger(states_[a], Own(attackers, states_[a].participant_id),
                 pieces[a]);
  }

  // Step 3: which target rows get poisoned.
  const auto count = static_cast<std::size_t>(std::floor(
      schedule_.budget_percent / 100.0 * static_cast<double>(target_rows.size()) +
      1e-9));
  std::vector<std::size_t> shuffled = target_rows;
  std::shuffle(shuffled.begin(), shuffled.end(), rng_);
  poison_rows_.assign(shuffled.begin(), shuffled.begin() + count);
  std::sort(poison_rows_.begin(), poison_rows_.end());
  poison_index_.clear();
  for (std::size_t j = 0; j < poison_rows_.size(); ++j) {
    poison_index_[poison_rows_[j]] = j;
  }

  for (AttackerState& s : states_) {
    const Participant& self = Own(attackers, s.participant_id);
    if (schedule_.epsilon) {
      s.epsilon = *schedule_.epsilon;
    } else {
      double total = 0.0;
      for (std::size_t id : target_rows) {
        total += std::sqrt(SquaredNorm(self.shard.rows.row(id)));
      }
      s.epsilon = target_rows.empty()
                      ? 0.0
                      : schedule_.epsilon_fraction * total /
                            static_cast<double>(target_rows.size());
    }
    s.perturbed = self.shard.rows.GatherRows(poison_rows_);
  }
  started_ = true;
  start_round_ = round;
}

void AttackCoordinator::PlaceTrigger(AttackerState& state,
                                     const Participant& self,
                                     const TriggerSpec& piece) {
  PlacedTrigger& placed = state.trigger;
  placed.participant_id = self.id;
  placed.spec = piece;
  placed.grid = self.shard.grid;
  const DenseNet classifier =
      DenseNet::Compose(self.bottom, state.surrogate.model.net);

  if (piece.mode == TriggerMode::kTabularOverwrite) {
    const std::size_t width = self.shard.rows.cols();
    if (piece.indices.empty()) {
      // Half of the features, the most salient ones.
      const std::vector<double> sal =
          MeanSaliency(classifier, self.shard.rows, source_rows_);
      std::vector<std::size_t> order(width);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return sal[a] > sal[b]; });
      order.resize((width + 1) / 2);
      std::sort(order.begin(), order.end());
      placed.spec.indices = order;
    }
    if (std::isnan(piece.tabular_fill)) {
      // Outside the usual range: shard max + 3 standard deviations.
      const auto values = self.shard.rows.values();
      double mx = values.empty() ? 0.0 : values[0];
      double mean = 0.0;
      for (double v : values) {
        mx = std::max(mx, v);
        mean += v;
      }
      mean /= static_cast<double>(values.size());
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      var /= static_cast<double>(values.size());
      placed.spec.tabular_fill = mx + 3.0 * std::sqrt(var);
    }
    placed.window = {};
    return;
  }

  if (!self.shard.grid) {
    throw std::invalid_argument("grid trigger needs a grid-shaped shard for "
                                "participant " +
                                std::to_string(self.id));
  }
  const GridShape& grid = *self.shard.grid;
  if (piece.height > grid.height || piece.width > grid.width) {
    throw std::invalid_argument(
        "trigger piece " + std::to_string(piece.height) + "x" +
        std::to_string(piece.width) + " does not fit the " +
        std::to_string(grid.height) + "x" + std::to_string(grid.width) +
        " strip of participant " + std::to_string(self.id));
  }
  if (schedule_.placement == TriggerPlacement::kRandom) {
    std::uniform_int_distribution<std::size_t> row(0, grid.height - piece.height);
    std::uniform_int_distribution<std::size_t> col(0, grid.width - piece.width);
    const std::size_t r = row(rng_);
    const std::size_t c = col(rng_);
    placed.window = {r, c, piece.height, piece.width};
    return;
  }
  const std::vector<double> sal =
      MeanSaliency(classifier, self.shard.rows, source_rows_);
  placed.window = PlanTriggerWindow(sal, grid, piece.height, piece.width);
}

void AttackCoordinator::OptimizeAll(
    std::span<const Participant* const> attackers) {
  if (poison_rows_.empty() || source_rows_.empty()) return;
  for (AttackerState& s : states_) {
    const Participant& self = Own(attackers, s.participant_id);
    const RealMatrix sources = ApplyTriggerRows(
        self.shard.rows.GatherRows(source_rows_), s.trigger.grid,
        s.trigger.spec, s.trigger.window);
    const RealMatrix targets = self.shard.rows.GatherRows(poison_rows_);
    PoisonOptions opts;
    opts.epsilon = s.epsilon;
    opts.steps = schedule_.poison_steps;
    opts.learning_rate = schedule_.poison_learning_rate;
    PoisonResult result = OptimizePoison(self.bottom, sources, targets, opts);
    s.perturbed = std::move(result.perturbed);
    s.objective = std::move(result.objective);
  }
}

void AttackCoordinator::RunAttackPhase(
    std::size_t round, std::span<const Participant* const> attackers) {
  if (round < schedule_.attack_round) {
    throw std::logic_error("RunAttackPhase at round " + std::to_string(round) +
                           " precedes R_n = " +
                           std::to_string(schedule_.attack_round));
  }
  if (!started_) {
    throw std::logic_error("RunAttackPhase before BeginBackdoor");
  }
  if ((round - start_round_) % schedule_.refresh == 0) OptimizeAll(attackers);
}

PoisonHook AttackCoordinator::Hook() const {
  return [this](const Participant& self, std::span<const std::size_t> batch_ids,
                RealMatrix& rows) {
    if (!started_ || poison_rows_.empty()) return;
    const AttackerState* state = nullptr;
    for (const AttackerState& s : states_) {
      if (s.participant_id == self.id) state = &s;
    }
    if (state == nullptr) return;
    for (std::size_t i = 0; i < batch_ids.size(); ++i) {
      auto it = poison_index_.find(batch_ids[i]);
      if (it == poison_index_.end()) continue;
      auto src = state->perturbed.row(it->second);
      std::copy(src.begin(), src.end(), rows.row(i).begin());
    }
  };
}

std::vector<PlacedTrigger> AttackCoordinator::triggers() const {
  std::vector<PlacedTrigger> out;
  for (const AttackerState& s : states_) out.push_back(s.trigger);
  return out;
}

double AttackCoordinator::PoisonEmbeddingGap(
    std::span<const Participant* const> attackers) const {
  if (!started_ || poison_rows_.empty() || source_rows_.empty()) return 0.0;
  double total = 0.0;
  for (const AttackerState& s : states_) {
    const Participant& self = Own(attackers, s.participant_id);
    const RealMatrix anchors =
        Forward(self.bottom,
                ApplyTriggerRows(self.shard.rows.GatherRows(source_rows_),
                                 s.trigger.grid, s.trigger.spec,
                                 s.trigger.window))
            .output();
    const RealMatrix poisoned = Forward(self.bottom, s.perturbed).output();
    double sum = 0.0;
    for (std::size_t j = 0; j < poisoned.rows(); ++j) {
      auto e = poisoned.row(j);
      auto a = anchors.row(j % anchors.rows());
      double d = 0.0;
      for (std::size_t k = 0; k < e.size(); ++k) d += (e[k] - a[k]) * (e[k] - a[k]);
      sum += std::sqrt(d);
    }
    total += sum / static_cast<double>(poisoned.rows());
  }
  return total / static_cast<double>(states_.size());
}

}  // namespace vflsim
