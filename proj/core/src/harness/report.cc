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

#include "vflsim/harness/report.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace vflsim {
namespace {

using nlohmann::json;

json Optional(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string Cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

std::string Cell(double v) { return Cell(std::optional<double>(v)); }

std::string Quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string ReportToJson(const ExperimentReport& r) {
  json j;
  j["name"] = r.name;
  j["seed"] = r.seed;
  j["config"] = json::parse(r.config_json);
  j["mta_series"] = r.mta_series;
  j["loss_series"] = r.loss_series;
  json cps = json::array();
  for (const Checkpoint& c : r.checkpoints) {
    cps.push_back({{"round", c.round},
                   {"mta", c.mta},
                   {"asr", Optional(c.asr)},
                   {"confusion", Optional(c.confusion)},
                   {"lia", Optional(c.lia)}});
  }
  j["checkpoints"] = cps;
  j["final"] = {{"mta", r.final_main.accuracy},
                {"precision", r.final_main.precision},
                {"recall", r.final_main.recall},
                {"asr", Optional(r.final_asr)},
                {"confusion", Optional(r.final_confusion)},
                {"lia", Optional(r.lia_at_attack)}};
  if (r.pair) {
    j["pair"] = {{"source", r.pair->source}, {"target", r.pair->target}};
  } else {
    j["pair"] = nullptr;
  }
  json triggers = json::array();
  for (const PlacedTrigger& t : r.triggers) {
    json tj = {{"participant", t.participant_id}};
    if (t.spec.mode == TriggerMode::kGridPatch) {
      tj["window"] = {{"row", t.window.row},
                      {"col", t.window.col},
                      {"height", t.window.height},
                      {"width", t.window.width}};
    } else {
      tj["indices"] = t.spec.indices;
      tj["fill"] = t.spec.tabular_fill;
    }
    triggers.push_back(tj);
  }
  j["triggers"] = triggers;
  j["poisoned_rows"] = r.poisoned_rows;
  j["poison_label_precision"] = Optional(r.poison_label_precision);
  j["poison_gap"] = {{"at_attack_round", Optional(r.poison_gap_start)},
                     {"final", Optional(r.poison_gap_end)}};
  j["labels_unchanged"] = r.labels_unchanged;
  j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j.dump(2);
}

void WriteText(const std::string& text, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void WriteReport(const ExperimentReport& report, const std::string& path) {
  WriteText(ReportToJson(report) + "\n", path);
}

std::string SweepRunsCsv(const SweepResult& result) {
  std::ostringstream out;
  out << "axis_value,seed,final_mta,final_asr,lia_at_rn\n";
  for (const SweepRun& r : result.runs) {
    out << Quote(r.value) << ',' << r.seed << ',' << Cell(r.final_mta) << ','
        << Cell(r.final_asr) << ',' << Cell(r.lia_at_attack) << '\n';
  }
  return out.str();
}

std::string SweepSummaryCsv(const SweepResult& result) {
  std::ostringstream out;
  out << "axis,axis_value,runs,mta_mean,mta_stdev,asr_mean,asr_stdev,"
         "lia_mean,lia_stdev\n";
  for (const SweepRow& row : result.rows) {
    auto stat = [](const Stat& s) {
      return s.count == 0 ? std::string(",") : Cell(s.mean) + "," + Cell(s.stdev);
    };
    out << result.axis << ',' << Quote(row.value) << ',' << row.mta.count << ','
        << stat(row.mta) << ',' << stat(row.asr) << ',' << stat(row.lia) << '\n';
  }
  return out.str();
}

}  // namespace vflsim
