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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "vflsim/harness/config.h"
#include "vflsim/harness/experiment.h"
#include "vflsim/harness/report.h"
#include "vflsim/harness/sweep.h"

namespace vflsim {
namespace {

using ::testing::HasSubstr;

constexpr const char* kSmallGrid = R"({
  "name": "small", "total_rounds": 12, "seeds": [0],
  "dataset": {"kind": "grid", "train_per_class": 60, "test_per_class": 20,
              "aux_per_class": 10},
  "split": {"participants": 2, "adversaries": [0]},
  "attack": {"attack_round": 6, "budget_percent": 10},
  "trigger": {"mode": "grid", "height": 3, "width": 3}
})";

std::string ConfigErrorPath(const std::string& json) {
  try {
    ParseConfig(json);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<accepted>";
}

TEST(ConfigTest, EmptyObjectGivesDefaults) {
  const ExperimentConfig c = ParseConfig("{}");
  EXPECT_EQ(c.total_rounds, 100u);
  EXPECT_EQ(c.dataset.kind, DatasetKind::kGrid);
  EXPECT_FALSE(c.attack_enabled);
  EXPECT_EQ(c.trigger.mode, TriggerMode::kGridPatch);
  EXPECT_EQ(c.trigger.width, 5u);
}

TEST(ConfigTest, AttackBlockEnablesAttackUnlessSwitchedOff) {
  EXPECT_TRUE(ParseConfig(R"({"attack": {}})").attack_enabled);
  EXPECT_FALSE(ParseConfig(R"({"attack": {"enabled": false}})").attack_enabled);
}

TEST(ConfigTest, BlobsDefaultToTabularTrigger) {
  const ExperimentConfig c = ParseConfig(R"({"dataset": {"kind": "blobs"}, "attack": {}})");
  EXPECT_EQ(c.trigger.mode, TriggerMode::kTabularOverwrite);
}

TEST(ConfigTest, UnknownKeysNameTheirPath) {
  EXPECT_EQ(ConfigErrorPath(R"({"modle": {}})"), "modle");
  EXPECT_EQ(ConfigErrorPath(R"({"model": {"lr": 0.1}})"), "model.lr");
  EXPECT_EQ(ConfigErrorPath(R"({"attack": {"budget": 5}})"), "attack.budget");
  EXPECT_EQ(ConfigErrorPath(R"({"dataset": {"kind": "grid", "dim": 3}})"), "dataset.dim");
}

TEST(ConfigTest, TypeAndRangeErrorsNameTheirPath) {
  EXPECT_EQ(ConfigErrorPath(R"({"total_rounds": "many"})"), "total_rounds");
  EXPECT_EQ(ConfigErrorPath(R"({"total_rounds": -3})"), "total_rounds");
  EXPECT_EQ(ConfigErrorPath(R"({"seeds": []})"), "seeds");
  EXPECT_EQ(ConfigErrorPath(R"({"dataset": {"kind": "images"}})"), "dataset.kind");
  EXPECT_EQ(ConfigErrorPath(R"({"dataset": {"known_fraction": 0}})"),
            "dataset.known_fraction");
  EXPECT_EQ(ConfigErrorPath("{not json"), "<root>");
}

TEST(ConfigTest, CrossFieldConsistency) {
  // R_n must precede the last round.
  EXPECT_THAT(ConfigErrorPath(R"({"total_rounds": 10, "attack": {"attack_round": 10}})"),
              HasSubstr("attack"));
  // Colluders must leave at least one honest party.
  EXPECT_THAT(ConfigErrorPath(R"({"split": {"participants": 2, "adversaries": [0, 1]},
                                  "attack": {}})"),
              HasSubstr("split"));
  // A 7x7 window does not fit a 12x6 strip.
  EXPECT_THAT(ConfigErrorPath(R"({"attack": {}, "trigger": {"height": 7, "width": 7}})"),
              HasSubstr("trigger"));
}

TEST(ConfigTest, JsonEchoParsesBackToTheSameConfig) {
  const ExperimentConfig c = ParseConfig(kSmallGrid);
  const std::string echo = ConfigToJson(c);
  EXPECT_EQ(ConfigToJson(ParseConfig(echo)), echo);
}

ExperimentConfig SmallGrid() { return ParseConfig(kSmallGrid); }

TEST(ExperimentTest, SameSeedSameReport) {
  const ExperimentConfig c = SmallGrid();
  ExperimentReport a = RunExperiment(c, 1);
  ExperimentReport b = RunExperiment(c, 1);
  a.wall_clock_seconds = b.wall_clock_seconds = 0.0;
  EXPECT_EQ(ReportToJson(a), ReportToJson(b));
}

TEST(ExperimentTest, SeriesLengthsAndCheckpoints) {
  const ExperimentConfig c = SmallGrid();
  const ExperimentReport r = RunExperiment(c, 2);
  EXPECT_EQ(r.mta_series.size(), 12u);
  EXPECT_EQ(r.loss_series.size(), 12u);
  std::vector<std::size_t> rounds;
  for (const Checkpoint& cp : r.checkpoints) rounds.push_back(cp.round);
  EXPECT_THAT(rounds, ::testing::Contains(10u));
  EXPECT_EQ(rounds.back(), 12u);
  for (double v : r.mta_series) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  ASSERT_TRUE(r.final_asr && r.lia_at_attack);
  EXPECT_GE(*r.final_asr, 0.0);
  EXPECT_LE(*r.final_asr, 1.0);
  EXPECT_GE(*r.lia_at_attack, 0.0);
  EXPECT_LE(*r.lia_at_attack, 1.0);
  EXPECT_TRUE(r.labels_unchanged);
}

TEST(ExperimentTest, AttackOffEqualsAttackAbsentEqualsBaseline) {
  ExperimentConfig off = SmallGrid();
  off.attack_enabled = false;
  ExperimentConfig absent = ParseConfig(R"({
    "name": "small", "total_rounds": 12,
    "dataset": {"kind": "grid", "train_per_class": 60, "test_per_class": 20,
                "aux_per_class": 10}})");
  const ExperimentReport a = RunExperiment(off, 3);
  const ExperimentReport b = RunExperiment(absent, 3);
  const ExperimentReport c = RunBaseline(SmallGrid(), 3);
  EXPECT_EQ(a.mta_series, b.mta_series);
  EXPECT_EQ(a.loss_series, b.loss_series);
  EXPECT_EQ(a.mta_series, c.mta_series);
  EXPECT_FALSE(a.final_asr.has_value());
}

TEST(ExperimentTest, ZeroBudgetAsrEqualsCleanRunUnderTheSameTrigger) {
  ExperimentConfig c = SmallGrid();
  c.attack.budget_percent = 0.0;
  const ExperimentReport attacked = RunExperiment(c, 4);
  ASSERT_TRUE(attacked.pair.has_value());
  const AsrProbe probe{*attacked.pair, attacked.triggers};
  const ExperimentReport clean = RunBaseline(c, 4, &probe);
  EXPECT_EQ(attacked.final_asr, clean.final_asr);
  EXPECT_EQ(attacked.final_confusion, clean.final_confusion);
  EXPECT_EQ(attacked.mta_series, clean.mta_series);
}

TEST(ExperimentTest, UnknownCsvFileFailsBeforeTraining) {
  ExperimentConfig c = ParseConfig(R"({"dataset": {"kind": "csv", "path": "/nonexistent.csv"}})");
  EXPECT_THROW(RunExperiment(c, 0), std::runtime_error);
}

TEST(SweepTest, SingleValueSingleSeedEqualsRun) {
  const ExperimentConfig c = SmallGrid();
  const std::vector<std::string> values = {"10"};
  const std::vector<std::uint64_t> seeds = {5};
  const SweepResult s = RunSweep(c, "budget_percent", values, seeds);
  const ExperimentReport r = RunExperiment(c, 5);
  ASSERT_EQ(s.runs.size(), 1u);
  EXPECT_EQ(s.runs[0].final_mta, r.final_main.accuracy);
  EXPECT_EQ(s.runs[0].final_asr, r.final_asr);
  EXPECT_EQ(s.runs[0].lia_at_attack, r.lia_at_attack);
  ASSERT_EQ(s.rows.size(), 1u);
  EXPECT_EQ(s.rows[0].mta.mean, r.final_main.accuracy);
  EXPECT_EQ(s.rows[0].mta.stdev, 0.0);
}

TEST(SweepTest, OneRowPerValueInInputOrder) {
  ExperimentConfig c = SmallGrid();
  c.total_rounds = 8;
  c.attack.total_rounds = 8;
  c.attack.attack_round = 4;
  const std::vector<std::string> values = {"3", "2"};
  const std::vector<std::uint64_t> seeds = {0, 1};
  const SweepResult s = RunSweep(c, "window_size", values, seeds);
  EXPECT_EQ(s.runs.size(), 4u);
  ASSERT_EQ(s.rows.size(), 2u);
  EXPECT_EQ(s.rows[0].value, "3");
  EXPECT_EQ(s.rows[1].value, "2");
  EXPECT_EQ(s.rows[0].mta.count, 2u);
}

TEST(SweepTest, RejectsUnknownAxisAndBadValues) {
  const ExperimentConfig c = SmallGrid();
  const std::vector<std::string> v = {"1"};
  const std::vector<std::uint64_t> seeds = {0};
  EXPECT_THROW(RunSweep(c, "learning_rate", v, seeds), ConfigError);
  ExperimentConfig copy = c;
  EXPECT_THROW(ApplyAxis(copy, "budget_percent", "ten"), ConfigError);
  EXPECT_THROW(ApplyAxis(copy, "selection", "best"), ConfigError);
  ApplyAxis(copy, "placement", "random");
  EXPECT_EQ(copy.attack.placement, TriggerPlacement::kRandom);
  ApplyAxis(copy, "dp_variance", "0.5");
  EXPECT_EQ(copy.defense.dp_variance, 0.5);
}

TEST(SummarizeTest, MeanAndSampleStdev) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  const Stat s = Summarize(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.stdev, std::sqrt(5.0 / 3.0));
  EXPECT_EQ(s.count, 4u);
  const std::vector<double> one = {7.0};
  EXPECT_EQ(Summarize(one).stdev, 0.0);
}

TEST(ReportTest, SweepCsvColumns) {
  SweepResult s;
  s.axis = "budget_percent";
  s.runs.push_back({"5", 0, 0.9, 0.5, 0.8});
  s.runs.push_back({"5", 1, 0.7, std::nullopt, std::nullopt});
  s.rows.push_back({"5", Summarize(std::vector<double>{0.9, 0.7}), {}, {}});
  std::istringstream runs(SweepRunsCsv(s));
  std::string header, first, second;
  std::getline(runs, header);
  std::getline(runs, first);
  std::getline(runs, second);
  EXPECT_EQ(header, "axis_value,seed,final_mta,final_asr,lia_at_rn");
  EXPECT_THAT(first, ::testing::StartsWith("5,0,0.9"));
  EXPECT_THAT(second, ::testing::EndsWith(",,"));
  EXPECT_THAT(SweepSummaryCsv(s), ::testing::StartsWith("axis,axis_value,runs,mta_mean"));
}

TEST(ReportTest, JsonCarriesSeriesAndConfig) {
  const ExperimentReport r = RunExperiment(SmallGrid(), 6);
  const std::string json = ReportToJson(r);
  EXPECT_THAT(json, HasSubstr("\"mta_series\""));
  EXPECT_THAT(json, HasSubstr("\"config\""));
  EXPECT_THAT(json, HasSubstr("\"seed\": 6"));
}

// LIA is a harness-side measurement; the adversary sources never mention it.
TEST(AccessAuditTest, AdversaryNeverSeesLiaOrTrueLabels) {
  const std::filesystem::path root = VFLSIM_SOURCE_DIR;
  for (const auto& dir : {root / "core" / "src" / "adversary",
                          root / "core" / "include" / "vflsim" / "adversary"}) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      std::ifstream in(entry.path());
      std::stringstream text;
      text << in.rdbuf();
      EXPECT_THAT(text.str(), ::testing::Not(HasSubstr("LabelInferenceAccuracy")))
          << entry.path();
      EXPECT_THAT(text.str(), ::testing::Not(HasSubstr("Server")))
          << entry.path();
    }
  }
}

#ifdef VFLSIM_CLI_PATH
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("vflsim_cli_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
    Write("good.json", R"({"name": "cli", "total_rounds": 3, "seeds": [0],
      "output": ")" + (dir_ / "from_config").string() + R"(",
      "dataset": {"kind": "blobs", "train_per_class": 40, "test_per_class": 10,
                  "aux_per_class": 5}})");
    Write("bad.json", R"({"model": {"widht": 3}})");
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  void Write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
  }
  int Cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + VFLSIM_CLI_PATH + " " + args + " > " +
                            (dir_ / "stdout.txt").string() + " 2> " +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string Stderr() const {
    std::ifstream in(dir_ / "stderr.txt");
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  std::filesystem::path dir_;
};

TEST_F(CliTest, ValidateAcceptsAndRejects) {
  EXPECT_EQ(Cli("validate " + (dir_ / "good.json").string()), 0);
  EXPECT_NE(Cli("validate " + (dir_ / "bad.json").string()), 0);
  EXPECT_THAT(Stderr(), HasSubstr("model.widht"));
  EXPECT_NE(Cli("validate " + (dir_ / "missing.json").string()), 0);
  EXPECT_NE(Cli("frobnicate"), 0);
}

TEST_F(CliTest, OutputDirectoryFromConfigAndEnvironment) {
  EXPECT_EQ(Cli("baseline " + (dir_ / "good.json").string()), 0);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "from_config" / "cli_baseline_seed0.json"));
  const std::filesystem::path env_dir = dir_ / "from_env";
  EXPECT_EQ(Cli("run " + (dir_ / "good.json").string(),
                "VFLSIM_OUTPUT_DIR=" + env_dir.string()),
            0);
  EXPECT_TRUE(std::filesystem::exists(env_dir / "cli_seed0.json"));
}

TEST_F(CliTest, SweepWritesCsvAndRejectsBadAxis) {
  Write("attack.json", R"({"name": "sw", "total_rounds": 6, "seeds": [0],
    "dataset": {"kind": "blobs", "train_per_class": 40, "test_per_class": 10,
                "aux_per_class": 5},
    "attack": {"attack_round": 3}})");
  const std::string env = "VFLSIM_OUTPUT_DIR=" + (dir_ / "sw").string();
  EXPECT_EQ(Cli("sweep " + (dir_ / "attack.json").string() +
                    " --axis budget_percent --values 0,20 --seeds 0,1",
                env),
            0);
  std::ifstream csv(dir_ / "sw" / "sw_sweep_budget_percent_runs.csv");
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  EXPECT_EQ(lines, 5);
  EXPECT_NE(Cli("sweep " + (dir_ / "attack.json").string() +
                    " --axis colour --values 1 --seeds 0",
                env),
            0);
  EXPECT_NE(Cli("sweep " + (dir_ / "attack.json").string() +
                    " --axis budget_percent --values 1 --seeds x",
                env),
            0);
}

#endif  // VFLSIM_CLI_PATH

}  // namespace
}  // namespace vflsim
