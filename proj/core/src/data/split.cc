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
#include <stdexcept>
#include <string>

#include "vflsim/data/dataset.h"

namespace vflsim {

bool SplitPlan::IsAdversary(int id) const {
  return std::find(adversary_ids.begin(), adversary_ids.end(), id) !=
         adversary_ids.end();
}

SplitPlan SplitPlan::Equal(std::size_t num_features, std::size_t num_parties,
                           const std::optional<GridShape>& grid,
                           std::vector<int> adversary_ids) {
  if (num_parties == 0) {
    throw std::invalid_argument("SplitPlan::Equal: need at least 1 party");
  }
  const std::size_t unit = grid ? grid->height : 1;
  const std::size_t units = grid ? grid->width : num_features;
  if (units < num_parties) {
    throw std::invalid_argument("SplitPlan::Equal: " + std::to_string(units) +
                                " columns cannot host " +
                                std::to_string(num_parties) + " parties");
  }
  SplitPlan plan;
  plan.adversary_ids = std::move(adversary_ids);
  std::size_t begin = 0;
  for (std::size_t k = 0; k < num_parties; ++k) {
    const std::size_t width =
        units / num_parties + (k < units % num_parties ? 1 : 0);
    plan.ranges.push_back({begin * unit, (begin + width) * unit});
    begin += width;
  }
  return plan;
}

void ValidateSplitPlan(const SplitPlan& plan, std::size_t num_features,
                       const std::optional<GridShape>& grid) {
  if (plan.ranges.empty()) {
    throw std::invalid_argument("SplitPlan: no participants");
  }
  std::size_t expected = 0;
  for (std::size_t k = 0; k < plan.ranges.size(); ++k) {
    const ColumnRange& r = plan.ranges[k];
    if (r.begin != expected || r.end <= r.begin) {
      throw std::invalid_argument(
          "SplitPlan: range of participant " + std::to_string(k) + " [" +
          std::to_string(r.begin) + ", " + std::to_string(r.end) +
          ") must start at " + std::to_string(expected) + " and be nonempty");
    }
    if (grid && (r.begin % grid->height != 0 || r.end % grid->height != 0)) {
      throw std::invalid_argument("SplitPlan: range of participant " +
                                  std::to_string(k) +
                                  " cuts through a pixel column");
    }
    expected = r.end;
  }
  if (expected != num_features) {
    throw std::invalid_argument("SplitPlan: ranges cover [0, " +
                                std::to_string(expected) + ") but data has " +
                                std::to_string(num_features) + " features");
  }
  for (int id : plan.adversary_ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= plan.ranges.size()) {
      throw std::invalid_argument("SplitPlan: adversary id " +
                                  std::to_string(id) + " is not a participant");
    }
  }
}

std::vector<FeatureShard> VerticalSplit(const RealMatrix& features,
                                        const SplitPlan& plan,
                                        const std::optional<GridShape>& grid) {
  ValidateSplitPlan(plan, features.cols(), grid);
  std::vector<FeatureShard> shards;
  shards.reserve(plan.ranges.size());
  for (std::size_t k = 0; k < plan.ranges.size(); ++k) {
    FeatureShard shard;
    shard.participant_id = static_cast<int>(k);
    shard.columns = plan.ranges[k];
    shard.rows = features.ColumnSlice(shard.columns.begin, shard.columns.end);
    if (grid) {
      shard.grid = GridShape{grid->height, shard.columns.width() / grid->height};
    }
    shards.push_back(std::move(shard));
  }
  return shards;
}

}  // namespace vflsim
