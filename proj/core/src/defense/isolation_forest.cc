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
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "vflsim/defense/defense.h"

namespace vflsim {
namespace {

constexpr double kEulerGamma = std::numbers::egamma;

struct TreeBuilder {
  const RealMatrix& points;
  std::size_t max_depth;
  std::mt19937_64& rng;
  IsolationTree tree;

  int Grow(std::vector<std::size_t>& ids, std::size_t depth) {
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[index].size = ids.size();
    tree.nodes[index].depth = depth;
    if (ids.size() <= 1 || depth >= max_depth) return index;

    std::vector<std::size_t> candidates;
    std::vector<std::pair<double, double>> ranges;
    for (std::size_t f = 0; f < points.cols(); ++f) {
      double lo = points(ids[0], f);
      double hi = lo;
      for (std::size_t id : ids) {
        lo = std::min(lo, points(id, f));
        hi = std::max(hi, points(id, f));
      }
      if (hi > lo) {
        candidates.push_back(f);
        ranges.emplace_back(lo, hi);
      }
    }
    if (candidates.empty()) return index;

    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    const std::size_t c = pick(rng);
    const std::size_t feature = candidates[c];
    std::uniform_real_distribution<double> between(ranges[c].first,
                                                   ranges[c].second);
    double split = between(rng);
    // Keep both sides nonempty.
    if (split <= ranges[c].first) split = std::nextafter(ranges[c].first, ranges[c].second);

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t id : ids) {
      (points(id, feature) < split ? left : right).push_back(id);
    }
    const int l = Grow(left, depth + 1);
    const int r = Grow(right, depth + 1);
    tree.nodes[index].feature = static_cast<int>(feature);
    tree.nodes[index].split = split;
    tree.nodes[index].left = l;
    tree.nodes[index].right = r;
    return index;
  }
};

}  // namespace

double AveragePathLength(std::size_t n) {
  if (n <= 1) return 0.0;
  const double m = static_cast<double>(n - 1);
  const double harmonic = std::log(m) + kEulerGamma;
  return 2.0 * harmonic - 2.0 * m / static_cast<double>(n);
}

double IsolationTree::PathLength(std::span<const double> point) const {
  int node = 0;
  while (!nodes[node].is_leaf()) {
    const IsolationNode& n = nodes[node];
    node = point[static_cast<std::size_t>(n.feature)] < n.split ? n.left : n.right;
  }
  return static_cast<double>(nodes[node].depth) +
         AveragePathLength(nodes[node].size);
}

IsolationForest::IsolationForest(std::vector<IsolationTree> trees,
                                 std::size_t subsample, std::size_t dim)
    : trees_(std::move(trees)),
      subsample_(subsample),
      dim_(dim),
      normalization_(AveragePathLength(subsample)) {}

double IsolationForest::ExpectedPathLength(std::span<const double> point) const {
  if (point.size() != dim_) {
    throw std::invalid_argument("IsolationForest: point has " +
                                std::to_string(point.size()) +
                                " dims, forest was fit on " +
                                std::to_string(dim_));
  }
  double total = 0.0;
  for (const IsolationTree& t : trees_) total += t.PathLength(point);
  return total / static_cast<double>(trees_.size());
}

double IsolationForest::Score(std::span<const double> point) const {
  const double h = ExpectedPathLength(point);
  // psi = 1 has no meaningful normalization; every point scores 1.
  if (normalization_ <= 0.0) return 1.0;
  return std::exp2(-h / normalization_);
}

std::vector<double> IsolationForest::ScoreRows(const RealMatrix& points) const {
  std::vector<double> scores(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) scores[i] = Score(points.row(i));
  return scores;
}

IsolationForest FitIsolationForest(const RealMatrix& points,
                                   const IsolationForestParams& params,
                                   std::mt19937_64& rng) {
  if (points.rows() < 2) {
    throw std::invalid_argument("FitIsolationForest: need at least 2 points");
  }
  if (params.num_trees == 0 || params.subsample < 2) {
    throw std::invalid_argument(
        "FitIsolationForest: need >= 1 tree and subsample >= 2");
  }
  const std::size_t psi = std::min(params.subsample, points.rows());
  const std::size_t depth_limit =
      params.max_depth > 0
          ? params.max_depth
          : static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(psi))));
  std::vector<std::size_t> all(points.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<IsolationTree> trees;
  trees.reserve(params.num_trees);
  for (std::size_t t = 0; t < params.num_trees; ++t) {
    std::vector<std::size_t> sample;
    sample.reserve(psi);
    std::sample(all.begin(), all.end(), std::back_inserter(sample), psi, rng);
    TreeBuilder builder{points, depth_limit, rng, {}};
    builder.Grow(sample, 0);
    trees.push_back(std::move(builder.tree));
  }
  return IsolationForest(std::move(trees), psi, points.cols());
}

}  // namespace vflsim
