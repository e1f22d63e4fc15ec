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

#include "vflsim/harness/experiment.h"

#include <algorithm>
#include <chrono>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>

#include "vflsim/adversary/attack.h"
#include "vflsim/common/random.h"

namespace vflsim {
namespace {

constexpr std::size_t kCheckpointEvery = 5;

std::vector<std::size_t> Dims(std::size_t in, const std::vector<std::size_t>& hidden,
                              std::size_t out) {
  std::vector<std::size_t> dims = {in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

Dataset LoadData(const ExperimentConfig& config, std::mt19937_64& rng) {
  const DatasetConfig& d = config.dataset;
  switch (d.kind) {
    case DatasetKind::kGrid: return GenerateGridImages(d.grid, rng);
    case DatasetKind::kBlobs: return GenerateBlobs(d.blobs, rng);
    case DatasetKind::kCsv: return LoadCsv(d.csv_path, LoadCsvSchema(d.csv_path));
  }
  throw std::logic_error("unknown dataset kind");
}

std::size_t TestPerClass(const ExperimentConfig& config, const Dataset& data) {
  if (config.dataset.test_per_class) return *config.dataset.test_per_class;
  switch (config.dataset.kind) {
    case DatasetKind::kGrid: return 100;
    case DatasetKind::kBlobs: return 125;
    case DatasetKind::kCsv: break;
  }
  std::size_t smallest = data.size();
  for (int c = 0; c < data.num_classes; ++c) {
    smallest = std::min(smallest, data.IdsOfClass(c).size());
  }
  return std::max<std::size_t>(1, smallest / 4);
}

// Label estimates the attackers would produce if inference stopped now.
// Used for the LIA curve before R_n; nothing flows back into the run.
LabelEstimates ProbeEstimates(const ExperimentConfig& config,
                              const std::vector<Participant>& participants,
                              const std::vector<AttackerKit>& kits,
                              const SurrogateOptions& options, int num_classes) {
  std::vector<LabelEstimates> votes;
  for (const AttackerKit& kit : kits) {
    const Participant& self = participants[kit.participant_id];
    SurrogateOptions opts = options;
    opts.seed ^= static_cast<std::uint64_t>(kit.participant_id);
    const SurrogateFit fit = TrainSurrogate(self.bottom, kit.aux, opts);
    votes.push_back(InferLabels(fit.model, self.bottom, self.shard.rows,
                                num_classes, config.attack.min_confidence));
  }
  return votes.size() == 1 ? votes.front() : VoteLabels(votes);
}

}  // namespace

PreparedData PrepareData(const ExperimentConfig& config, std::uint64_t seed) {
  std::mt19937_64 data_rng = MakeStream(seed, "data");
  Dataset full = LoadData(config, data_rng);
  full.Validate();

  std::mt19937_64 split_rng = MakeStream(seed, "split");
  TrainTestSplit tt = SplitTrainTest(full, TestPerClass(config, full), split_rng);

  std::mt19937_64 aux_rng = MakeStream(seed, "aux");
  PreparedData out;
  out.aux = SampleAuxiliary(tt.train, config.dataset.aux_per_class,
                            config.dataset.known_fraction, aux_rng);
  out.train = out.aux.remaining;
  out.test = std::move(tt.test);

  out.plan = SplitPlan::Equal(out.train.dim(), config.split.participants,
                              out.train.grid, config.split.adversaries);
  ValidateSplitPlan(out.plan, out.train.dim(), out.train.grid);
  out.train_shards = VerticalSplit(out.train.features, out.plan, out.train.grid);
  for (const FeatureShard& s : VerticalSplit(out.test.features, out.plan,
                                             out.test.grid)) {
    out.test_inputs.push_back(s.rows);
  }
  return out;
}

std::vector<Participant> MakeParticipants(const ExperimentConfig& config,
                                          const PreparedData& data,
                                          std::uint64_t seed) {
  std::vector<Participant> participants;
  for (const FeatureShard& shard : data.train_shards) {
    std::mt19937_64 rng =
        MakeStream(seed, "model/bottom/" + std::to_string(shard.participant_id));
    Participant p;
    p.id = shard.participant_id;
    p.shard = shard;
    p.bottom = DenseNet::Glorot(
        Dims(shard.columns.width(), config.model.bottom_hidden,
             config.model.embedding_dim),
        rng);
    p.role = data.plan.IsAdversary(p.id) ? Role::kAdversary : Role::kHonest;
    participants.push_back(std::move(p));
  }
  return participants;
}

DenseNet MakeTopModel(const ExperimentConfig& config, int classes,
                      std::uint64_t seed) {
  std::mt19937_64 rng = MakeStream(seed, "model/top");
  return DenseNet::Glorot(
      Dims(config.split.participants * config.model.embedding_dim,
           config.model.top_hidden, static_cast<std::size_t>(classes)),
      rng);
}

double LabelInferenceAccuracy(const LabelEstimates& estimates,
                              std::span<const int> truth) {
  if (estimates.labels.size() != truth.size()) {
    throw std::invalid_argument("LabelInferenceAccuracy: " +
                                std::to_string(estimates.labels.size()) +
                                " estimates for " + std::to_string(truth.size()) +
                                " labels");
  }
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    hits += estimates.labels[i] == truth[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

ExperimentReport RunExperiment(const ExperimentConfig& config, std::uint64_t seed,
                               const AsrProbe* probe) {
  ValidateConfig(config);
  const auto started = std::chrono::steady_clock::now();

  PreparedData data = PrepareData(config, seed);
  const int num_classes = data.train.num_classes;
  std::vector<Participant> participants = MakeParticipants(config, data, seed);

  DenseNet top = MakeTopModel(config, num_classes, seed);
  DefenseConfig defense = config.defense;
  if (config.anomaly_budget_from_attack) {
    defense.anomaly_budget_percent = config.attack.budget_percent;
  }
  defense.seed = MakeStream(seed, "defense")();
  Server server(std::move(top), data.train.labels, num_classes,
                config.model.learning_rate, defense);
  const std::vector<int> labels_before = server.labels();

  // Adversary wiring: each attacker gets only its own auxiliary columns.
  std::vector<AttackerKit> kits;
  std::vector<const Participant*> attackers;
  for (int id : config.split.adversaries) {
    kits.push_back({id, MakeAuxiliarySet(data.aux, data.plan.ranges[id])});
  }
  std::sort(kits.begin(), kits.end(),
            [](const auto& a, const auto& b) { return a.participant_id < b.participant_id; });
  for (const AttackerKit& kit : kits) attackers.push_back(&participants[kit.participant_id]);

  AttackSchedule schedule = config.attack;
  schedule.total_rounds = config.total_rounds;
  schedule.surrogate.seed = MakeStream(seed, "surrogate")();
  std::unique_ptr<AttackCoordinator> coordinator;
  if (config.attack_enabled) {
    coordinator = std::make_unique<AttackCoordinator>(
        schedule, config.trigger, kits, num_classes, seed);
  }

  ExperimentReport report;
  report.name = config.name;
  report.seed = seed;
  report.config_json = ConfigToJson(config);

  const std::size_t n = data.train.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch =
      config.model.batch_size == 0 ? n : std::min(config.model.batch_size, n);
  std::mt19937_64 batch_rng = MakeStream(seed, "batches");

  PoisonHook hook;
  for (std::size_t r = 0; r < config.total_rounds; ++r) {
    if (coordinator && r == schedule.attack_round) {
      coordinator->BeginBackdoor(r, attackers);
      report.lia_at_attack =
          LabelInferenceAccuracy(coordinator->estimates(), server.labels());
      report.pair = coordinator->pair();
      report.triggers = coordinator->triggers();
      report.poisoned_rows = coordinator->poison_rows().size();
      if (report.poisoned_rows > 0) {
        std::size_t hits = 0;
        for (std::size_t id : coordinator->poison_rows()) {
          hits += server.labels()[id] == report.pair->target ? 1 : 0;
        }
        report.poison_label_precision =
            static_cast<double>(hits) / static_cast<double>(report.poisoned_rows);
      }
      report.poison_gap_start = coordinator->PoisonEmbeddingGap(attackers);
      hook = coordinator->Hook();
    }
    if (coordinator && r >= schedule.attack_round) {
      coordinator->RunAttackPhase(r, attackers);
    }

    if (batch < n) std::shuffle(order.begin(), order.end(), batch_rng);
    double loss = 0.0;
    for (std::size_t begin = 0; begin < n; begin += batch) {
      const std::size_t end = std::min(n, begin + batch);
      std::span<const std::size_t> ids(order.data() + begin, end - begin);
      const RoundTrace trace = RunTrainingRound(server, participants, ids, hook);
      loss += trace.loss * static_cast<double>(ids.size());
    }
    report.loss_series.push_back(loss / static_cast<double>(n));

    const std::vector<int> predicted =
        PredictJoint(server, participants, data.test_inputs);
    const MainTaskMetrics main =
        ClassificationMetrics(predicted, data.test.labels, num_classes);
    report.mta_series.push_back(main.accuracy);

    const std::size_t done = r + 1;
    const bool last = done == config.total_rounds;
    if (done % kCheckpointEvery != 0 && !last) continue;

    Checkpoint cp;
    cp.round = done;
    cp.mta = main.accuracy;
    const bool attacking = coordinator && coordinator->started();
    if (attacking || probe) {
      const ClassPair pair = attacking ? coordinator->pair() : probe->pair;
      const std::vector<PlacedTrigger> triggers =
          attacking ? coordinator->triggers() : probe->triggers;
      cp.asr = EvaluateAsr(server, participants, data.test_inputs,
                           data.test.labels, triggers, pair.source, pair.target);
      cp.confusion = ConfusionRate(predicted, data.test.labels, pair.source,
                                   pair.target);
    }
    if (coordinator) {
      if (done <= schedule.attack_round) {
        cp.lia = LabelInferenceAccuracy(
            ProbeEstimates(config, participants, kits, schedule.surrogate,
                           num_classes),
            server.labels());
      } else {
        cp.lia = report.lia_at_attack;
      }
    }
    report.checkpoints.push_back(cp);
    if (last) {
      report.final_main = main;
      report.final_asr = cp.asr;
      report.final_confusion = cp.confusion;
    }
  }

  if (coordinator && coordinator->started()) {
    report.poison_gap_end = coordinator->PoisonEmbeddingGap(attackers);
  } else if (probe) {
    report.pair = probe->pair;
    report.triggers = probe->triggers;
  }
  report.labels_unchanged = server.labels() == labels_before;
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return report;
}

ExperimentReport RunBaseline(const ExperimentConfig& config, std::uint64_t seed,
                             const AsrProbe* probe) {
  ExperimentConfig clean = config;
  clean.attack_enabled = false;
  return RunExperiment(clean, seed, probe);
}

}  // namespace vflsim
