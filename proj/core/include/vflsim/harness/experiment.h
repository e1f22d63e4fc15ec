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

#ifndef VFLSIM_HARNESS_EXPERIMENT_H_
#define VFLSIM_HARNESS_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vflsim/adversary/label_inference.h"
#include "vflsim/adversary/poisoning.h"
#include "vflsim/adversary/trigger.h"
#include "vflsim/data/dataset.h"
#include "vflsim/harness/config.h"
#include "vflsim/vfl/protocol.h"

namespace vflsim {

// Everything drawn from the data streams of one seed.
struct PreparedData {
  Dataset train;  // protocol training pool, auxiliary rows removed
  Dataset test;
  AuxiliarySplit aux;
  SplitPlan plan;
  std::vector<FeatureShard> train_shards;
  std::vector<RealMatrix> test_inputs;  // per participant
};

PreparedData PrepareData(const ExperimentConfig& config, std::uint64_t seed);

// Fresh bottom models and top model for one seed.
std::vector<Participant> MakeParticipants(const ExperimentConfig& config,
                                          const PreparedData& data,
                                          std::uint64_t seed);
DenseNet MakeTopModel(const ExperimentConfig& config, int num_classes,
                      std::uint64_t seed);

// Share of rows whose estimate equals the true label. kUnrecognized never
// matches.
double LabelInferenceAccuracy(const LabelEstimates& estimates,
                              std::span<const int> truth);

struct Checkpoint {
  std::size_t round = 0;  // rounds completed
  double mta = 0.0;
  std::optional<double> asr;        // triggered source rows sent to target
  std::optional<double> confusion;  // untriggered source rows sent to target
  std::optional<double> lia;
};

// Triggers and class pair to evaluate inside a run that does not attack,
// e.g. a clean run paired with an attacked one.
struct AsrProbe {
  ClassPair pair;
  std::vector<PlacedTrigger> triggers;
};

struct ExperimentReport {
  std::string name;
  std::uint64_t seed = 0;
  std::string config_json;
  std::vector<double> mta_series;   // one entry per round
  std::vector<double> loss_series;
  std::vector<Checkpoint> checkpoints;
  MainTaskMetrics final_main;
  std::optional<double> final_asr;
  std::optional<double> final_confusion;
  std::optional<double> lia_at_attack;
  std::optional<ClassPair> pair;
  std::vector<PlacedTrigger> triggers;
  std::size_t poisoned_rows = 0;
  // Share of poisoned rows whose true label is the target class.
  std::optional<double> poison_label_precision;
  std::optional<double> poison_gap_start;  // at R_n
  std::optional<double> poison_gap_end;    // after the last round
  bool labels_unchanged = true;
  double wall_clock_seconds = 0.0;
};

// Phase 1 before R_n is honest training; at R_n the coordinator infers
// labels, picks the pair and places triggers; from R_n on the poisoned rows
// are substituted. MTA is recorded every round, ASR and LIA every 5 rounds
// and after the last one.
ExperimentReport RunExperiment(const ExperimentConfig& config,
                               std::uint64_t seed,
                               const AsrProbe* probe = nullptr);

// Same config with the attack switched off.
ExperimentReport RunBaseline(const ExperimentConfig& config, std::uint64_t seed,
                             const AsrProbe* probe = nullptr);

}  // namespace vflsim

#endif  // VFLSIM_HARNESS_EXPERIMENT_H_
