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

#ifndef VFLSIM_DEFENSE_DEFENSE_H_
#define VFLSIM_DEFENSE_DEFENSE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "vflsim/nn/matrix.h"

namespace vflsim {

// Average unsuccessful-search path length of a binary search tree over n
// points: c(n) = 2 H(n - 1) - 2 (n - 1) / n with H(i) = ln(i) + Euler's
// constant. c(n) = 0 for n <= 1.
double AveragePathLength(std::size_t n);

struct IsolationForestParams {
  std::size_t num_trees = 100;
  std::size_t subsample = 256;  // psi, capped at the number of points
  std::size_t max_depth = 0;    // 0: ceil(log2(psi))
};

struct IsolationNode {
  int feature = -1;  // -1 marks a leaf
  double split = 0.0;
  int left = -1;
  int right = -1;
  std::size_t size = 0;  // training points that reached this node
  std::size_t depth = 0;

  bool is_leaf() const { return feature < 0; }
};

struct IsolationTree {
  std::vector<IsolationNode> nodes;  // nodes[0] is the root

  // depth of the reached leaf + c(leaf size).
  double PathLength(std::span<const double> point) const;
};

class IsolationForest {
 public:
  IsolationForest(std::vector<IsolationTree> trees, std::size_t subsample,
                  std::size_t dim);

  // Mean path length over trees.
  double ExpectedPathLength(std::span<const double> point) const;
  // 2^(-E[h] / c(psi)), in (0, 1].
  double Score(std::span<const double> point) const;
  std::vector<double> ScoreRows(const RealMatrix& points) const;

  const std::vector<IsolationTree>& trees() const { return trees_; }
  std::size_t subsample() const { return subsample_; }
  std::size_t dim() const { return dim_; }
  double normalization() const { return normalization_; }

 private:
  std::vector<IsolationTree> trees_;
  std::size_t subsample_;
  std::size_t dim_;
  double normalization_;
};

// Each tree grows on a uniform subsample of min(psi, n) points; every node
// picks a uniform feature among those not constant on the node and a uniform
// split inside that feature's range, until isolation or the depth limit.
IsolationForest FitIsolationForest(const RealMatrix& points,
                                   const IsolationForestParams& params,
                                   std::mt19937_64& rng);

// Adds independent N(0, variance) to every entry. variance == 0 returns the
// input unchanged without touching the generator.
RealMatrix AddDpNoise(const RealMatrix& embeddings, double variance,
                      std::mt19937_64& rng);

// For every class k and participant i, fits a forest on the class-k rows of
// embeddings[i] and excludes the ceil(budget% * |class k|) highest-scoring
// rows. Returns the sorted union of excluded row indices.
std::vector<std::size_t> FilterClassAnomalies(
    std::span<const RealMatrix> embeddings, std::span<const int> labels,
    double budget_percent, const IsolationForestParams& params,
    std::mt19937_64& rng);

// Stateful variant of FilterClassAnomalies that keeps the per
// (participant, class) forests between calls; forests are rebuilt when
// `refit` is true or missing.
class ClassAnomalyFilter {
 public:
  std::vector<std::size_t> Exclude(std::span<const RealMatrix> embeddings,
                                   std::span<const int> labels,
                                   double budget_percent,
                                   const IsolationForestParams& params,
                                   bool refit, std::mt19937_64& rng);

 private:
  // forests_[participant][class]
  std::vector<std::vector<std::optional<IsolationForest>>> forests_;
};

struct DefenseConfig {
  double dp_variance = 0.0;             // 0 disables noise
  double anomaly_budget_percent = 0.0;  // 0 disables filtering
  IsolationForestParams forest;
  std::size_t refit_every = 1;  // rounds between forest refits
  std::uint64_t seed = 0;

  bool noise_enabled() const { return dp_variance > 0.0; }
  bool filter_enabled() const { return anomaly_budget_percent > 0.0; }
  // Throws std::invalid_argument when out of range.
  void Validate() const;
};

}  // namespace vflsim

#endif  // VFLSIM_DEFENSE_DEFENSE_H_
