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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "vflsim/defense/defense.h"

namespace vflsim {

RealMatrix AddDpNoise(const RealMatrix& embeddings, double variance,
                      std::mt19937_64& rng) {
  if (!(variance >= 0.0)) {
    throw std::invalid_argument("AddDpNoise: variance must be >= 0, got " +
                                std::to_string(variance));
  }
  RealMatrix out = embeddings;
  if (variance == 0.0) return out;
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  for (double& v : out.values()) v += normal(rng);
  return out;
}

std::vector<std::size_t> ClassAnomalyFilter::Exclude(
    std::span<const RealMatrix> embeddings, std::span<const int> labels,
    double budget_percent, const IsolationForestParams& params, bool refit,
    std::mt19937_64& rng) {
  if (!(budget_percent >= 0.0 && budget_percent < 100.0)) {
    throw std::invalid_argument(
        "anomaly filter budget must be in [0, 100), got " +
        std::to_string(budget_percent));
  }
  if (budget_percent == 0.0) return {};
  int num_classes = 0;
  for (int y : labels) num_classes = std::max(num_classes, y + 1);
  if (forests_.size() != embeddings.size()) {
    forests_.assign(embeddings.size(), {});
    refit = true;
  }
  std::vector<bool> excluded(labels.size(), false);
  for (std::size_t p = 0; p < embeddings.size(); ++p) {
    if (embeddings[p].rows() != labels.size()) {
      throw std::invalid_argument("anomaly filter: embeddings of participant " +
                                  std::to_string(p) + " have " +
                                  std::to_string(embeddings[p].rows()) +
                                  " rows for " + std::to_string(labels.size()) +
                                  " labels");
    }
    if (forests_[p].size() < static_cast<std::size_t>(num_classes)) {
      forests_[p].resize(static_cast<std::size_t>(num_classes));
    }
    for (int k = 0; k < num_classes; ++k) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == k) members.push_back(i);
      }
      if (members.size() < 2) continue;
      const auto count = static_cast<std::size_t>(std::ceil(
          budget_percent / 100.0 * static_cast<double>(members.size()) - 1e-9));
      if (count == 0) continue;
      const RealMatrix points = embeddings[p].GatherRows(members);
      auto& forest = forests_[p][static_cast<std::size_t>(k)];
      if (refit || !forest) forest = FitIsolationForest(points, params, rng);
      const std::vector<double> scores = forest->ScoreRows(points);
      std::vector<std::size_t> order(members.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      // Highest score first; ties keep the lower row index.
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
      });
      for (std::size_t j = 0; j < count; ++j) excluded[members[order[j]]] = true;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < excluded.size(); ++i) {
    if (excluded[i]) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FilterClassAnomalies(
    std::span<const RealMatrix> embeddings, std::span<const int> labels,
    double budget_percent, const IsolationForestParams& params,
    std::mt19937_64& rng) {
  ClassAnomalyFilter filter;
  return filter.Exclude(embeddings, labels, budget_percent, params, true, rng);
}

void DefenseConfig::Validate() const {
  if (!(dp_variance >= 0.0) || !std::isfinite(dp_variance)) {
    throw std::invalid_argument("defense.dp_variance must be finite and >= 0");
  }
  if (!(anomaly_budget_percent >= 0.0 && anomaly_budget_percent <= 100.0)) {
    throw std::invalid_argument(
        "defense.anomaly_budget_percent must be in [0, 100]");
  }
  if (anomaly_budget_percent == 100.0) {
    throw std::invalid_argument(
        "defense.anomaly_budget_percent = 100 would exclude every sample");
  }
  if (forest.num_trees == 0 || forest.subsample < 2) {
    throw std::invalid_argument(
        "defense.forest needs num_trees >= 1 and subsample >= 2");
  }
  if (refit_every == 0) {
    throw std::invalid_argument("defense.refit_every must be >= 1");
  }
}

}  // namespace vflsim
