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
#include <stdexcept>
#include <string>

#include "vflsim/data/dataset.h"

namespace vflsim {

void Dataset::Validate() const {
  if (features.rows() != labels.size()) {
    throw std::invalid_argument("Dataset: " + std::to_string(labels.size()) +
                                " labels for features " +
                                features.ShapeString());
  }
  if (num_classes < 2) {
    throw std::invalid_argument("Dataset: need at least 2 classes, got " +
                                std::to_string(num_classes));
  }
  if (!features.AllFinite()) {
    throw std::invalid_argument("Dataset: non-finite feature value");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw std::invalid_argument("Dataset: label " + std::to_string(labels[i]) +
                                  " at row " + std::to_string(i) +
                                  " outside [0, " +
                                  std::to_string(num_classes) + ")");
    }
  }
  if (grid && grid->size() != features.cols()) {
    throw std::invalid_argument("Dataset: grid " + std::to_string(grid->height) +
                                "x" + std::to_string(grid->width) +
                                " does not cover " +
                                std::to_string(features.cols()) + " features");
  }
}

Dataset Dataset::Subset(std::span<const std::size_t> ids) const {
  Dataset out;
  out.features = features.GatherRows(ids);
  out.labels.reserve(ids.size());
  for (std::size_t id : ids) out.labels.push_back(labels[id]);
  out.num_classes = num_classes;
  out.grid = grid;
  return out;
}

std::vector<std::size_t> Dataset::IdsOfClass(int label) const {
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) ids.push_back(i);
  }
  return ids;
}

TrainTestSplit SplitTrainTest(const Dataset& data, std::size_t test_per_class,
                              std::mt19937_64& rng) {
  std::vector<std::size_t> train_ids;
  std::vector<std::size_t> test_ids;
  for (int c = 0; c < data.num_classes; ++c) {
    std::vector<std::size_t> ids = data.IdsOfClass(c);
    if (ids.size() <= test_per_class) {
      throw std::invalid_argument(
          "SplitTrainTest: class " + std::to_string(c) + " has " +
          std::to_string(ids.size()) + " samples, cannot hold out " +
          std::to_string(test_per_class));
    }
    std::shuffle(ids.begin(), ids.end(), rng);
    test_ids.insert(test_ids.end(), ids.begin(), ids.begin() + test_per_class);
    train_ids.insert(train_ids.end(), ids.begin() + test_per_class, ids.end());
  }
  std::sort(train_ids.begin(), train_ids.end());
  std::sort(test_ids.begin(), test_ids.end());
  return {data.Subset(train_ids), data.Subset(test_ids)};
}

}  // namespace vflsim
