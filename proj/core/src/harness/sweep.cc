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

#include "vflsim/harness/sweep.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

namespace vflsim {
namespace {

double ParseNumber(std::string_view axis, std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError(std::string(axis), "cannot parse value '" + std::string(text) + "'");
  }
  return value;
}

std::size_t ParseCount(std::string_view axis, std::string_view text) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(axis),
                      "expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

const std::vector<std::string>& SweepableAxes() {
  static const std::vector<std::string> axes = {
      "attack_round", "budget_percent", "window_size", "dp_variance",
      "participants", "selection",      "placement",   "known_fraction"};
  return axes;
}

bool IsSweepableAxis(std::string_view axis) {
  const auto& axes = SweepableAxes();
  return std::find(axes.begin(), axes.end(), axis) != axes.end();
}

void ApplyAxis(ExperimentConfig& config, std::string_view axis,
               std::string_view value) {
  if (axis == "attack_round") {
    config.attack.attack_round = ParseCount(axis, value);
  } else if (axis == "budget_percent") {
    config.attack.budget_percent = ParseNumber(axis, value);
  } else if (axis == "window_size") {
    const std::size_t w = ParseCount(axis, value);
    config.trigger.height = w;
    config.trigger.width = w;
  } else if (axis == "dp_variance") {
    config.defense.dp_variance = ParseNumber(axis, value);
  } else if (axis == "participants") {
    config.split.participants = ParseCount(axis, value);
  } else if (axis == "selection") {
    if (value == "optimal") {
      config.attack.selection = SelectionStrategy::kOptimal;
    } else if (value == "random") {
      config.attack.selection = SelectionStrategy::kRandom;
    } else {
      throw ConfigError("selection", "expected optimal or random");
    }
  } else if (axis == "placement") {
    if (value == "saliency") {
      config.attack.placement = TriggerPlacement::kSaliency;
    } else if (value == "random") {
      config.attack.placement = TriggerPlacement::kRandom;
    } else {
      throw ConfigError("placement", "expected saliency or random");
    }
  } else if (axis == "known_fraction") {
    config.dataset.known_fraction = ParseNumber(axis, value);
  } else {
    std::string names;
    for (const std::string& a : SweepableAxes()) names += (names.empty() ? "" : ", ") + a;
    throw ConfigError(std::string(axis), "not a sweepable axis (choose from " + names + ")");
  }
  ValidateConfig(config);
}

Stat Summarize(std::span<const double> values) {
  Stat s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stdev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

SweepResult RunSweep(const ExperimentConfig& base, std::string_view axis,
                     std::span<const std::string> values,
                     std::span<const std::uint64_t> seeds,
                     const std::function<void(const ExperimentReport&)>& on_run) {
  if (!IsSweepableAxis(axis)) {
    ExperimentConfig probe = base;
    ApplyAxis(probe, axis, "");  // throws with the list of axes
  }
  if (values.empty()) throw ConfigError("values", "need at least one value");
  if (seeds.empty()) throw ConfigError("seeds", "need at least one seed");

  // Configs are built and validated up front so that a bad value is
  // rejected before any compute.
  std::vector<ExperimentConfig> configs;
  for (const std::string& v : values) {
    ExperimentConfig c = base;
    ApplyAxis(c, axis, v);
    configs.push_back(std::move(c));
  }

  SweepResult result;
  result.axis = std::string(axis);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::vector<double> mta, asr, lia;
    for (std::uint64_t seed : seeds) {
      const ExperimentReport report = RunExperiment(configs[i], seed);
      if (on_run) on_run(report);
      SweepRun run;
      run.value = values[i];
      run.seed = seed;
      run.final_mta = report.final_main.accuracy;
      run.final_asr = report.final_asr;
      run.lia_at_attack = report.lia_at_attack;
      mta.push_back(run.final_mta);
      if (run.final_asr) asr.push_back(*run.final_asr);
      if (run.lia_at_attack) lia.push_back(*run.lia_at_attack);
      result.runs.push_back(run);
    }
    result.rows.push_back({values[i], Summarize(mta), Summarize(asr), Summarize(lia)});
  }
  return result;
}

}  // namespace vflsim
