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

#ifndef VFLSIM_HARNESS_CONFIG_H_
#define VFLSIM_HARNESS_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vflsim/adversary/attack.h"
#include "vflsim/adversary/trigger.h"
#include "vflsim/data/dataset.h"
#include "vflsim/defense/defense.h"

namespace vflsim {

// Rejection of a configuration. `path` names the offending field, e.g.
// "attack.attack_round".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class DatasetKind { kGrid, kBlobs, kCsv };

struct DatasetConfig {
  DatasetKind kind = DatasetKind::kGrid;
  GridParams grid;    // per_class counts train + test
  BlobParams blobs;
  std::string csv_path;
  std::optional<std::size_t> test_per_class;  // unset: per-kind default
  std::size_t aux_per_class = 40;
  double known_fraction = 1.0;
};

struct SplitConfig {
  std::size_t participants = 2;
  std::vector<int> adversaries = {0};
};

struct ModelConfig {
  std::vector<std::size_t> bottom_hidden = {32, 32};
  std::size_t embedding_dim = 16;
  std::vector<std::size_t> top_hidden = {32};
  double learning_rate = 0.1;
  std::size_t batch_size = 64;  // 0: full batch
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::size_t total_rounds = 100;
  DatasetConfig dataset;
  SplitConfig split;
  ModelConfig model;
  bool attack_enabled = false;
  AttackSchedule attack;
  TriggerSpec trigger = DefaultTrigger();
  DefenseConfig defense;
  // The server is told the attack's poisoning budget.
  bool anomaly_budget_from_attack = false;
  std::vector<std::uint64_t> seeds = {0};
  std::string output_dir = "vflsim_out";

  static TriggerSpec DefaultTrigger();
};

// Parses a JSON document. Unknown keys, wrong types and out-of-range values
// throw ConfigError; the result has passed ValidateConfig.
ExperimentConfig ParseConfig(std::string_view json_text);
ExperimentConfig LoadConfig(const std::string& path);

// Cross-field checks: R_n < TotalRounds, M < K, adversary ids in range and
// distinct, trigger fits every adversary strip, aux counts available.
void ValidateConfig(const ExperimentConfig& config);

// Canonical JSON echo with every field spelled out.
std::string ConfigToJson(const ExperimentConfig& config);

std::string_view DatasetKindName(DatasetKind kind);

}  // namespace vflsim

#endif  // VFLSIM_HARNESS_CONFIG_H_
