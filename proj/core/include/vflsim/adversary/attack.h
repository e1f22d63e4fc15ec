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

#ifndef VFLSIM_ADVERSARY_ATTACK_H_
#define VFLSIM_ADVERSARY_ATTACK_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "vflsim/adversary/auxiliary_set.h"
#include "vflsim/adversary/label_inference.h"
#include "vflsim/adversary/poisoning.h"
#include "vflsim/adversary/trigger.h"
#include "vflsim/vfl/participant.h"

namespace vflsim {

enum class TriggerPlacement { kSaliency, kRandom };

struct AttackSchedule {
  std::size_t total_rounds = 100;
  std::size_t attack_round = 60;  // R_n: inference stops, poisoning starts
  double budget_percent = 10.0;   // share of the estimated target class
  // L2 bound on the learned noise. Unset: epsilon_fraction times the mean L2
  // norm of the attacker's estimated target-class rows.
  std::optional<double> epsilon;
  double epsilon_fraction = 1.0;
  SelectionStrategy selection = SelectionStrategy::kOptimal;
  TriggerPlacement placement = TriggerPlacement::kSaliency;
  std::size_t poison_steps = 50;
  double poison_learning_rate = 0.5;
  std::size_t refresh = 5;  // rounds between poison re-optimisations
  SurrogateOptions surrogate;
  double min_confidence = 0.5;  // below this a row is kUnrecognized

  // Throws std::invalid_argument naming the offending field.
  void Validate() const;
};

// What one compromised participant brings to the attack besides its
// Participant record: the auxiliary samples restricted to its columns.
struct AttackerKit {
  int participant_id = 0;
  AuxiliarySet aux;
};

// Per-attacker state fixed at R_n.
struct AttackerState {
  int participant_id = 0;
  SurrogateFit surrogate;
  LabelEstimates own_estimates;
  PlacedTrigger trigger;
  double epsilon = 0.0;
  RealMatrix perturbed;            // current poisoned versions of poison_rows
  std::vector<double> objective;   // last optimisation trace
};

// Drives one or more colluding attackers. Every method that needs model or
// data access receives only the attackers' own Participant records.
class AttackCoordinator {
 public:
  AttackCoordinator(AttackSchedule schedule, TriggerSpec trigger,
                    std::vector<AttackerKit> kits, int num_classes,
                    std::uint64_t seed);

  // Round R_n: each attacker trains its surrogate and infers labels; the
  // estimates are merged by vote, the class pair chosen, triggers placed and
  // the poisoned rows drawn.
  void BeginBackdoor(std::size_t round,
                     std::span<const Participant* const> attackers);

  // Any round >= R_n after BeginBackdoor: re-optimises poison noise against
  // the current bottom models when a refresh is due.
  void RunAttackPhase(std::size_t round,
                      std::span<const Participant* const> attackers);

  // Substitutes the poisoned rows of each attacker's batch.
  PoisonHook Hook() const;

  bool started() const { return started_; }
  const AttackSchedule& schedule() const { return schedule_; }
  const LabelEstimates& estimates() const { return estimates_; }
  const ClassPair& pair() const { return pair_; }
  const std::vector<std::size_t>& poison_rows() const { return poison_rows_; }
  const std::vector<AttackerState>& attackers() const { return states_; }
  std::vector<PlacedTrigger> triggers() const;

  // Mean over attackers and poisoned rows of the embedding distance between
  // the perturbed target row and its paired triggered source row.
  double PoisonEmbeddingGap(std::span<const Participant* const> attackers) const;

 private:
  const Participant& Own(std::span<const Participant* const> attackers,
                         int id) const;
  void PlaceTrigger(AttackerState& state, const Participant& self,
                    const TriggerSpec& piece);
  void OptimizeAll(std::span<const Participant* const> attackers);

  AttackSchedule schedule_;
  TriggerSpec trigger_;
  std::vector<AttackerKit> kits_;
  int num_classes_;
  std::mt19937_64 rng_;

  bool started_ = false;
  std::size_t start_round_ = 0;
  LabelEstimates estimates_;
  ClassPair pair_;
  std::vector<std::size_t> source_rows_;  // shuffled estimated source ids
  std::vector<std::size_t> poison_rows_;  // sorted training ids
  std::map<std::size_t, std::size_t> poison_index_;
  std::vector<AttackerState> states_;
};

}  // namespace vflsim

#endif  // VFLSIM_ADVERSARY_ATTACK_H_
