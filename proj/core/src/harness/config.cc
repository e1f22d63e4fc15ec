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

#include "vflsim/harness/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace vflsim {
namespace {

using nlohmann::json;

std::string Join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Reads the keys of one JSON object and remembers which were consumed so
// that leftovers can be reported as unknown.
class Block {
 public:
  Block(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) {
      throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }
  }

  bool Has(const std::string& key) const { return node_.contains(key); }

  const json* Get(const std::string& key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  std::string PathOf(const std::string& key) const { return Join(path_, key); }

  void Number(const std::string& key, double& out) {
    if (const json* v = Get(key)) {
      if (!v->is_number()) throw ConfigError(PathOf(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(PathOf(key), "must be finite");
    }
  }

  void Count(const std::string& key, std::size_t& out) {
    if (const json* v = Get(key)) out = AsCount(*v, PathOf(key));
  }

  void Flag(const std::string& key, bool& out) {
    if (const json* v = Get(key)) {
      if (!v->is_boolean()) throw ConfigError(PathOf(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void Text(const std::string& key, std::string& out) {
    if (const json* v = Get(key)) {
      if (!v->is_string()) throw ConfigError(PathOf(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void Counts(const std::string& key, std::vector<std::size_t>& out) {
    if (const json* v = Get(key)) {
      if (!v->is_array()) throw ConfigError(PathOf(key), "expected an array");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        out.push_back(AsCount((*v)[i], PathOf(key) + "[" + std::to_string(i) + "]"));
      }
    }
  }

  void Finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(PathOf(it.key()), "unknown key");
    }
  }

  static std::size_t AsCount(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ConfigError(path, "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Enum>
Enum Choice(Block& block, const std::string& key, Enum current,
            std::initializer_list<std::pair<const char*, Enum>> options) {
  const json* v = block.Get(key);
  if (!v) return current;
  std::string names;
  if (v->is_string()) {
    for (const auto& [name, value] : options) {
      if (*v == name) return value;
    }
  }
  for (const auto& [name, value] : options) {
    names += names.empty() ? "" : ", ";
    names += name;
  }
  throw ConfigError(block.PathOf(key), "expected one of: " + names);
}

void ParseDataset(Block b, DatasetConfig& d) {
  d.kind = Choice(b, "kind", d.kind,
                  {{"grid", DatasetKind::kGrid},
                   {"blobs", DatasetKind::kBlobs},
                   {"csv", DatasetKind::kCsv}});
  std::size_t test = 0;
  if (b.Has("test_per_class")) {
    b.Count("test_per_class", test);
    d.test_per_class = test;
  }
  b.Count("aux_per_class", d.aux_per_class);
  b.Number("known_fraction", d.known_fraction);

  // Keys that belong to another dataset kind are rejected as unknown.
  std::size_t train = 0;
  switch (d.kind) {
    case DatasetKind::kGrid: {
      std::size_t classes = static_cast<std::size_t>(d.grid.num_classes);
      b.Count("num_classes", classes);
      d.grid.num_classes = static_cast<int>(classes);
      b.Count("height", d.grid.height);
      b.Count("width", d.grid.width);
      b.Number("noise", d.grid.noise);
      b.Number("close_pair_factor", d.grid.close_pair_factor);
      b.Number("right_signal", d.grid.right_signal);
      train = d.grid.per_class -
              std::min(d.grid.per_class, d.test_per_class.value_or(100));
      b.Count("train_per_class", train);
      d.grid.per_class = train + d.test_per_class.value_or(100);
      break;
    }
    case DatasetKind::kBlobs: {
      std::size_t classes = static_cast<std::size_t>(d.blobs.num_classes);
      b.Count("num_classes", classes);
      d.blobs.num_classes = static_cast<int>(classes);
      b.Count("dim", d.blobs.dim);
      b.Number("spread", d.blobs.spread);
      b.Number("center_distance", d.blobs.center_distance);
      b.Number("close_pair_factor", d.blobs.close_pair_factor);
      train = d.blobs.per_class -
              std::min(d.blobs.per_class, d.test_per_class.value_or(125));
      b.Count("train_per_class", train);
      d.blobs.per_class = train + d.test_per_class.value_or(125);
      break;
    }
    case DatasetKind::kCsv:
      b.Text("path", d.csv_path);
      break;
  }
  b.Finish();
}

void ParseSplit(Block b, SplitConfig& s) {
  b.Count("participants", s.participants);
  if (const json* v = b.Get("adversaries")) {
    if (!v->is_array()) throw ConfigError(b.PathOf("adversaries"), "expected an array");
    s.adversaries.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      s.adversaries.push_back(static_cast<int>(Block::AsCount(
          (*v)[i], b.PathOf("adversaries") + "[" + std::to_string(i) + "]")));
    }
  }
  b.Finish();
}

void ParseModel(Block b, ModelConfig& m) {
  b.Counts("bottom_hidden", m.bottom_hidden);
  b.Count("embedding_dim", m.embedding_dim);
  b.Counts("top_hidden", m.top_hidden);
  b.Number("learning_rate", m.learning_rate);
  b.Count("batch_size", m.batch_size);
  b.Finish();
}

void ParseAttack(Block b, ExperimentConfig& c) {
  AttackSchedule& a = c.attack;
  c.attack_enabled = true;
  b.Flag("enabled", c.attack_enabled);
  b.Count("attack_round", a.attack_round);
  b.Number("budget_percent", a.budget_percent);
  if (b.Has("epsilon")) {
    double eps = 0.0;
    b.Number("epsilon", eps);
    a.epsilon = eps;
  }
  b.Number("epsilon_fraction", a.epsilon_fraction);
  a.selection = Choice(b, "selection", a.selection,
                       {{"optimal", SelectionStrategy::kOptimal},
                        {"random", SelectionStrategy::kRandom}});
  a.placement = Choice(b, "placement", a.placement,
                       {{"saliency", TriggerPlacement::kSaliency},
                        {"random", TriggerPlacement::kRandom}});
  b.Count("poison_steps", a.poison_steps);
  b.Number("poison_learning_rate", a.poison_learning_rate);
  b.Count("refresh", a.refresh);
  b.Counts("surrogate_hidden", a.surrogate.hidden);
  b.Count("surrogate_epochs", a.surrogate.epochs);
  b.Number("surrogate_learning_rate", a.surrogate.learning_rate);
  b.Number("min_confidence", a.min_confidence);
  b.Finish();
}

void ParseTrigger(Block b, TriggerSpec& t) {
  t.mode = Choice(b, "mode", t.mode,
                  {{"grid", TriggerMode::kGridPatch},
                   {"tabular", TriggerMode::kTabularOverwrite}});
  if (t.mode == TriggerMode::kGridPatch) {
    b.Count("height", t.height);
    b.Count("width", t.width);
    t.pattern = Choice(b, "pattern", t.pattern,
                       {{"constant", FillPattern::kConstant},
                        {"checkerboard", FillPattern::kCheckerboard}});
    b.Number("fill", t.fill);
    b.Number("fill_alt", t.fill_alt);
  } else {
    b.Counts("indices", t.indices);
    b.Number("fill", t.tabular_fill);
  }
  b.Finish();
}

void ParseDefense(Block b, ExperimentConfig& c) {
  DefenseConfig& d = c.defense;
  b.Number("dp_variance", d.dp_variance);
  if (const json* v = b.Get("anomaly_budget")) {
    if (v->is_string() && *v == "attack") {
      c.anomaly_budget_from_attack = true;
    } else if (v->is_number()) {
      d.anomaly_budget_percent = v->get<double>();
    } else {
      throw ConfigError(b.PathOf("anomaly_budget"),
                        "expected a percentage or \"attack\"");
    }
  }
  b.Count("num_trees", d.forest.num_trees);
  b.Count("subsample", d.forest.subsample);
  b.Count("max_depth", d.forest.max_depth);
  b.Count("refit_every", d.refit_every);
  b.Finish();
}

void Fail(const std::string& path, const std::string& message) {
  throw ConfigError(path, message);
}

}  // namespace

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::invalid_argument(path + ": " + message), path_(std::move(path)) {}

TriggerSpec ExperimentConfig::DefaultTrigger() {
  TriggerSpec t;
  t.mode = TriggerMode::kGridPatch;
  t.height = 5;
  t.width = 5;
  t.pattern = FillPattern::kConstant;
  t.fill = 1.0;
  return t;
}

std::string_view DatasetKindName(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kGrid: return "grid";
    case DatasetKind::kBlobs: return "blobs";
    case DatasetKind::kCsv: return "csv";
  }
  return "?";
}

ExperimentConfig ParseConfig(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  ExperimentConfig c;
  Block b(root, "");
  b.Text("name", c.name);
  b.Count("total_rounds", c.total_rounds);
  b.Text("output", c.output_dir);
  if (const json* v = b.Get("seeds")) {
    if (!v->is_array() || v->empty()) Fail("seeds", "expected a nonempty array");
    c.seeds.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      c.seeds.push_back(Block::AsCount((*v)[i], "seeds[" + std::to_string(i) + "]"));
    }
  }
  if (const json* v = b.Get("dataset")) ParseDataset(Block(*v, "dataset"), c.dataset);
  if (const json* v = b.Get("split")) ParseSplit(Block(*v, "split"), c.split);
  if (const json* v = b.Get("model")) ParseModel(Block(*v, "model"), c.model);
  if (const json* v = b.Get("attack")) ParseAttack(Block(*v, "attack"), c);
  // Blob rows have no grid, so their default trigger overwrites features.
  if (c.dataset.kind == DatasetKind::kBlobs) {
    c.trigger.mode = TriggerMode::kTabularOverwrite;
  }
  if (const json* v = b.Get("trigger")) ParseTrigger(Block(*v, "trigger"), c.trigger);
  if (const json* v = b.Get("defense")) ParseDefense(Block(*v, "defense"), c);
  b.Finish();
  c.attack.total_rounds = c.total_rounds;
  ValidateConfig(c);
  return c;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str());
}

void ValidateConfig(const ExperimentConfig& c) {
  if (c.total_rounds == 0) Fail("total_rounds", "must be >= 1");
  if (c.seeds.empty()) Fail("seeds", "need at least one seed");

  const DatasetConfig& d = c.dataset;
  if (!(d.known_fraction > 0.0 && d.known_fraction <= 1.0)) {
    Fail("dataset.known_fraction", "must be in (0, 1]");
  }
  std::size_t features = 0;
  std::size_t smallest_class = 0;
  std::optional<GridShape> grid;
  int classes = 0;
  switch (d.kind) {
    case DatasetKind::kGrid:
      if (d.grid.num_classes < 2) Fail("dataset.num_classes", "must be >= 2");
      if (d.grid.height < 6 || d.grid.width < 6) {
        Fail("dataset.height", "grid must be at least 6x6");
      }
      if (!(d.grid.noise >= 0.0)) Fail("dataset.noise", "must be >= 0");
      if (!(d.grid.close_pair_factor >= 0.0 && d.grid.close_pair_factor <= 1.0)) {
        Fail("dataset.close_pair_factor", "must be in [0, 1]");
      }
      if (!(d.grid.right_signal >= 0.0 && d.grid.right_signal <= 1.0)) {
        Fail("dataset.right_signal", "must be in [0, 1]");
      }
      features = d.grid.height * d.grid.width;
      grid = GridShape{d.grid.height, d.grid.width};
      smallest_class = d.grid.per_class;
      classes = d.grid.num_classes;
      break;
    case DatasetKind::kBlobs:
      if (d.blobs.num_classes < 2) Fail("dataset.num_classes", "must be >= 2");
      if (d.blobs.dim < 2) Fail("dataset.dim", "must be >= 2");
      if (static_cast<std::size_t>(d.blobs.num_classes) > d.blobs.dim + 1) {
        Fail("dataset.num_classes", "at most dim + 1 classes fit the center layout");
      }
      if (!(d.blobs.spread >= 0.0)) Fail("dataset.spread", "must be >= 0");
      if (!(d.blobs.center_distance > 0.0)) {
        Fail("dataset.center_distance", "must be > 0");
      }
      if (!(d.blobs.close_pair_factor > 0.0)) {
        Fail("dataset.close_pair_factor", "must be > 0");
      }
      features = d.blobs.dim;
      smallest_class = d.blobs.per_class;
      classes = d.blobs.num_classes;
      break;
    case DatasetKind::kCsv:
      if (d.csv_path.empty()) Fail("dataset.path", "required for kind csv");
      break;
  }
  if (d.kind != DatasetKind::kCsv) {
    const std::size_t test =
        d.test_per_class.value_or(d.kind == DatasetKind::kGrid ? 100 : 125);
    if (test == 0 || test >= smallest_class) {
      Fail("dataset.test_per_class", "must be in [1, per-class count)");
    }
    if (d.aux_per_class + 1 > smallest_class - test) {
      Fail("dataset.aux_per_class",
           "leaves no training rows (" + std::to_string(smallest_class - test) +
               " per class before auxiliary sampling)");
    }
  }

  const SplitConfig& s = c.split;
  if (s.participants == 0) Fail("split.participants", "must be >= 1");
  if (s.adversaries.size() >= s.participants && !s.adversaries.empty()) {
    Fail("split.adversaries", "need M < K");
  }
  std::set<int> distinct;
  for (std::size_t i = 0; i < s.adversaries.size(); ++i) {
    const int id = s.adversaries[i];
    const std::string path = "split.adversaries[" + std::to_string(i) + "]";
    if (id < 0 || static_cast<std::size_t>(id) >= s.participants) {
      Fail(path, "participant id out of range");
    }
    if (!distinct.insert(id).second) Fail(path, "duplicate adversary id");
  }
  if (features != 0) {
    const std::size_t units = grid ? grid->width : features;
    if (s.participants > units) {
      Fail("split.participants", "more participants than " +
                                     std::string(grid ? "pixel columns" : "features"));
    }
  }

  const ModelConfig& m = c.model;
  if (m.embedding_dim == 0) Fail("model.embedding_dim", "must be >= 1");
  for (std::size_t i = 0; i < m.bottom_hidden.size(); ++i) {
    if (m.bottom_hidden[i] == 0) Fail("model.bottom_hidden", "widths must be >= 1");
  }
  for (std::size_t i = 0; i < m.top_hidden.size(); ++i) {
    if (m.top_hidden[i] == 0) Fail("model.top_hidden", "widths must be >= 1");
  }
  if (!(m.learning_rate > 0.0)) Fail("model.learning_rate", "must be > 0");

  if (c.attack_enabled || c.anomaly_budget_from_attack) {
    if (c.attack.total_rounds != c.total_rounds) {
      Fail("attack.total_rounds", "out of sync with total_rounds");
    }
    try {
      c.attack.Validate();
    } catch (const std::invalid_argument& e) {
      const std::string what = e.what();
      const auto colon = what.find(' ');
      Fail(what.substr(0, colon), what.substr(colon + 1));
    }
  }
  if (c.attack_enabled) {
    if (s.adversaries.empty()) Fail("split.adversaries", "attack needs an adversary");
    if (d.known_fraction * classes < 2.0 - 1e-9 && classes != 0) {
      Fail("dataset.known_fraction", "attack needs at least two known classes");
    }
    const TriggerSpec& t = c.trigger;
    if (t.mode == TriggerMode::kGridPatch) {
      if (!grid && d.kind != DatasetKind::kCsv) {
        Fail("trigger.mode", "grid trigger on a dataset without grid shape");
      }
      if (t.height == 0 || t.width == 0) Fail("trigger.height", "must be >= 1");
      if (t.width < s.adversaries.size()) {
        Fail("trigger.width", "narrower than the number of attackers");
      }
      if (grid) {
        const SplitPlan plan =
            SplitPlan::Equal(features, s.participants, grid, s.adversaries);
        const auto pieces = SplitTrigger(t, s.adversaries.size());
        std::vector<int> ids = s.adversaries;
        std::sort(ids.begin(), ids.end());
        for (std::size_t a = 0; a < ids.size(); ++a) {
          const std::size_t strip = plan.ranges[ids[a]].width() / grid->height;
          if (pieces[a].height > grid->height || pieces[a].width > strip) {
            Fail("trigger.width",
                 "piece " + std::to_string(pieces[a].height) + "x" +
                     std::to_string(pieces[a].width) +
                     " does not fit the strip of participant " +
                     std::to_string(ids[a]) + " (" +
                     std::to_string(grid->height) + "x" +
                     std::to_string(strip) + ")");
          }
        }
      }
    } else {
      if (!std::isnan(t.tabular_fill) && !std::isfinite(t.tabular_fill)) {
        Fail("trigger.fill", "must be finite");
      }
    }
  }

  try {
    DefenseConfig probe = c.defense;
    if (c.anomaly_budget_from_attack) probe.anomaly_budget_percent = c.attack.budget_percent;
    probe.Validate();
  } catch (const std::invalid_argument& e) {
    Fail("defense", e.what());
  }
  if (c.defense.forest.num_trees == 0) Fail("defense.num_trees", "must be >= 1");
  if (c.defense.forest.subsample < 2) Fail("defense.subsample", "must be >= 2");
  if (c.defense.refit_every == 0) Fail("defense.refit_every", "must be >= 1");
}

std::string ConfigToJson(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["total_rounds"] = c.total_rounds;
  j["seeds"] = c.seeds;
  j["output"] = c.output_dir;

  json d;
  d["kind"] = DatasetKindName(c.dataset.kind);
  d["aux_per_class"] = c.dataset.aux_per_class;
  d["known_fraction"] = c.dataset.known_fraction;
  if (c.dataset.test_per_class) d["test_per_class"] = *c.dataset.test_per_class;
  const std::size_t test = c.dataset.test_per_class.value_or(
      c.dataset.kind == DatasetKind::kGrid ? 100 : 125);
  switch (c.dataset.kind) {
    case DatasetKind::kGrid:
      d["num_classes"] = c.dataset.grid.num_classes;
      d["height"] = c.dataset.grid.height;
      d["width"] = c.dataset.grid.width;
      d["noise"] = c.dataset.grid.noise;
      d["close_pair_factor"] = c.dataset.grid.close_pair_factor;
      d["right_signal"] = c.dataset.grid.right_signal;
      d["train_per_class"] = c.dataset.grid.per_class - test;
      break;
    case DatasetKind::kBlobs:
      d["num_classes"] = c.dataset.blobs.num_classes;
      d["dim"] = c.dataset.blobs.dim;
      d["spread"] = c.dataset.blobs.spread;
      d["center_distance"] = c.dataset.blobs.center_distance;
      d["close_pair_factor"] = c.dataset.blobs.close_pair_factor;
      d["train_per_class"] = c.dataset.blobs.per_class - test;
      break;
    case DatasetKind::kCsv:
      d["path"] = c.dataset.csv_path;
      break;
  }
  j["dataset"] = d;
  j["split"] = {{"participants", c.split.participants},
                {"adversaries", c.split.adversaries}};
  j["model"] = {{"bottom_hidden", c.model.bottom_hidden},
                {"embedding_dim", c.model.embedding_dim},
                {"top_hidden", c.model.top_hidden},
                {"learning_rate", c.model.learning_rate},
                {"batch_size", c.model.batch_size}};

  const AttackSchedule& a = c.attack;
  json attack = {
      {"enabled", c.attack_enabled},
      {"attack_round", a.attack_round},
      {"budget_percent", a.budget_percent},
      {"epsilon_fraction", a.epsilon_fraction},
      {"selection", a.selection == SelectionStrategy::kOptimal ? "optimal" : "random"},
      {"placement", a.placement == TriggerPlacement::kSaliency ? "saliency" : "random"},
      {"poison_steps", a.poison_steps},
      {"poison_learning_rate", a.poison_learning_rate},
      {"refresh", a.refresh},
      {"surrogate_hidden", a.surrogate.hidden},
      {"surrogate_epochs", a.surrogate.epochs},
      {"surrogate_learning_rate", a.surrogate.learning_rate},
      {"min_confidence", a.min_confidence}};
  if (a.epsilon) attack["epsilon"] = *a.epsilon;
  j["attack"] = attack;

  const TriggerSpec& t = c.trigger;
  if (t.mode == TriggerMode::kGridPatch) {
    j["trigger"] = {
        {"mode", "grid"},
        {"height", t.height},
        {"width", t.width},
        {"pattern", t.pattern == FillPattern::kConstant ? "constant" : "checkerboard"},
        {"fill", t.fill},
        {"fill_alt", t.fill_alt}};
  } else {
    json trig = {{"mode", "tabular"}, {"indices", t.indices}};
    if (!std::isnan(t.tabular_fill)) trig["fill"] = t.tabular_fill;
    j["trigger"] = trig;
  }

  json def = {{"dp_variance", c.defense.dp_variance},
              {"num_trees", c.defense.forest.num_trees},
              {"subsample", c.defense.forest.subsample},
              {"max_depth", c.defense.forest.max_depth},
              {"refit_every", c.defense.refit_every}};
  if (c.anomaly_budget_from_attack) {
    def["anomaly_budget"] = "attack";
  } else {
    def["anomaly_budget"] = c.defense.anomaly_budget_percent;
  }
  j["defense"] = def;
  return j.dump(2);
}

}  // namespace vflsim
