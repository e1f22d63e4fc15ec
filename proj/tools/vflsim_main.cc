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

// Command line front end: run, sweep, baseline and validate subcommands over
// a JSON experiment config.

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vflsim/harness/config.h"
#include "vflsim/harness/experiment.h"
#include "vflsim/harness/report.h"
#include "vflsim/harness/sweep.h"

namespace {

constexpr const char* kOutputEnv = "VFLSIM_OUTPUT_DIR";

std::string OutputDir(const vflsim::ExperimentConfig& config) {
  if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env != '\0') {
    return env;
  }
  return config.output_dir;
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) {
      throw vflsim::ConfigError("list", "empty entry in '" + text + "'");
    }
    out.push_back(item.substr(b, e - b + 1));
  }
  if (out.empty()) throw vflsim::ConfigError("list", "empty list");
  return out;
}

std::vector<std::uint64_t> ParseSeeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& s : SplitList(text)) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.front() == '-') {
      throw vflsim::ConfigError("--seeds", "not a seed: '" + s + "'");
    }
    seeds.push_back(v);
  }
  return seeds;
}

void PrintSummary(const vflsim::ExperimentReport& r, const std::string& path) {
  std::cout << r.name << " seed " << r.seed << ": MTA " << r.final_main.accuracy;
  if (r.final_asr) std::cout << "  ASR " << *r.final_asr;
  if (r.lia_at_attack) std::cout << "  LIA " << *r.lia_at_attack;
  std::cout << "  (" << r.wall_clock_seconds << " s) -> " << path << "\n";
}

int RunAll(const std::string& config_path, bool clean) {
  const vflsim::ExperimentConfig config = vflsim::LoadConfig(config_path);
  const std::string dir = OutputDir(config);
  for (std::uint64_t seed : config.seeds) {
    const vflsim::ExperimentReport report =
        clean ? vflsim::RunBaseline(config, seed)
              : vflsim::RunExperiment(config, seed);
    const std::string path = (std::filesystem::path(dir) /
                              (config.name + (clean ? "_baseline" : "") +
                               "_seed" + std::to_string(seed) + ".json"))
                                 .string();
    vflsim::WriteReport(report, path);
    PrintSummary(report, path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vertical federated learning backdoor simulator"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run every seed of a config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();

  auto* baseline = app.add_subcommand("baseline", "Run the config with the attack off");
  baseline->add_option("config", config_path, "Experiment config (JSON)")->required();

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config_path, "Experiment config (JSON)")->required();

  std::string axis, values, seeds;
  auto* sweep = app.add_subcommand("sweep", "Sweep one axis over values and seeds");
  sweep->add_option("config", config_path, "Experiment config (JSON)")->required();
  sweep->add_option("--axis", axis, "Axis to vary")->required();
  sweep->add_option("--values", values, "Comma separated axis values")->required();
  sweep->add_option("--seeds", seeds, "Comma separated seeds")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return RunAll(config_path, false);
    if (*baseline) return RunAll(config_path, true);
    if (*validate) {
      const vflsim::ExperimentConfig config = vflsim::LoadConfig(config_path);
      std::cout << config_path << ": ok\n" << vflsim::ConfigToJson(config) << "\n";
      return 0;
    }
    if (*sweep) {
      const vflsim::ExperimentConfig config = vflsim::LoadConfig(config_path);
      const std::vector<std::string> value_list = SplitList(values);
      const std::vector<std::uint64_t> seed_list = ParseSeeds(seeds);
      const vflsim::SweepResult result = vflsim::RunSweep(
          config, axis, value_list, seed_list,
          [](const vflsim::ExperimentReport& r) { PrintSummary(r, "-"); });
      const std::filesystem::path dir(OutputDir(config));
      const std::string stem = config.name + "_sweep_" + axis;
      vflsim::WriteText(vflsim::SweepRunsCsv(result),
                        (dir / (stem + "_runs.csv")).string());
      vflsim::WriteText(vflsim::SweepSummaryCsv(result),
                        (dir / (stem + "_summary.csv")).string());
      std::cout << vflsim::SweepSummaryCsv(result);
      return 0;
    }
  } catch (const vflsim::ConfigError& e) {
    std::cerr << "vflsim: invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "vflsim: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
