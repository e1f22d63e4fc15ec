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

AuxiliarySplit SampleAuxiliary(const Dataset& data, std::size_t per_class,
                               double known_fraction, std::mt19937_64& rng) {
  if (!(known_fraction > 0.0 && known_fraction <= 1.0)) {
    throw std::invalid_argument("SampleAuxiliary: known-class fraction must be "
                                "in (0, 1], got " +
                                std::to_string(known_fraction));
  }
  const int n_known = static_cast<int>(
      std::ceil(known_fraction * data.num_classes - 1e-9));
  std::vector<int> classes(static_cast<std::size_t>(data.num_classes));
  for (int c = 0; c < data.num_classes; ++c) classes[c] = c;
  std::shuffle(classes.begin(), classes.end(), rng);
  classes.resize(static_cast<std::size_t>(n_known));
  std::sort(classes.begin(), classes.end());

  AuxiliarySplit split;
  split.known_classes = classes;
  for (int c : classes) {
    std::vector<std::size_t> ids = data.IdsOfClass(c);
    if (ids.size() < per_class) {
      throw std::invalid_argument(
          "SampleAuxiliary: class " + std::to_string(c) + " has " +
          std::to_string(ids.size()) + " samples, " +
          std::to_string(per_class) + " requested");
    }
    std::shuffle(ids.begin(), ids.end(), rng);
    split.aux_ids.insert(split.aux_ids.end(), ids.begin(),
                         ids.begin() + per_class);
  }
  std::sort(split.aux_ids.begin(), split.aux_ids.end());
  std::vector<bool> taken(data.size(), false);
  for (std::size_t id : split.aux_ids) taken[id] = true;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!taken[i]) split.remaining_ids.push_back(i);
  }
  split.aux = data.Subset(split.aux_ids);
  split.remaining = data.Subset(split.remaining_ids);
  return split;
}

AuxiliarySet MakeAuxiliarySet(const AuxiliarySplit& split,
                              const ColumnRange& columns) {
  AuxiliarySet aux;
  aux.samples = split.aux.features.ColumnSlice(columns.begin, columns.end);
  aux.labels = split.aux.labels;
  aux.known_classes = split.known_classes;
  return aux;
}

}  // namespace vflsim
