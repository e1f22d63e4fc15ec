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

#ifndef VFLSIM_HARNESS_SWEEP_H_
#define VFLSIM_HARNESS_SWEEP_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vflsim/harness/config.h"
#include "vflsim/harness/experiment.h"

namespace vflsim {

// attack_round, budget_percent, window_size, dp_variance, participants,
// selection, placement, known_fraction.
const std::vector<std::string>& SweepableAxes();
bool IsSweepableAxis(std::string_view axis);

// Sets one axis on a copy-ready config and revalidates. Throws ConfigError for
// unknown axes or unparsable values.
void ApplyAxis(ExperimentConfig& config, std::string_view axis,
               std::string_view value);

struct SweepRun {
  std::string value;
  std::uint64_t seed = 0;
  double final_mta = 0.0;
  std::optional<double> final_asr;
  std::optional<double> lia_at_attack;
};

struct Stat {
  double mean = 0.0;
  double stdev = 0.0;  // sample stdev, 0 for a single run
  std::size_t count = 0;
};

Stat Summarize(std::span<const double> values);

struct SweepRow {
  std::string value;
  Stat mta;
  Stat asr;
  Stat lia;
};

struct SweepResult {
  std::string axis;
  std::vector<SweepRun> runs;
  std::vector<SweepRow> rows;  // one per value, in input order
};

SweepResult RunSweep(
    const ExperimentConfig& base, std::string_view axis,
    std::span<const std::string> values, std::span<const std::uint64_t> seeds,
    const std::function<void(const ExperimentReport&)>& on_run = {});

}  // namespace vflsim

#endif  // VFLSIM_HARNESS_SWEEP_H_
