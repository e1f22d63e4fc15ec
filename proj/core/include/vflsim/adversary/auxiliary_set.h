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

#ifndef VFLSIM_ADVERSARY_AUXILIARY_SET_H_
#define VFLSIM_ADVERSARY_AUXILIARY_SET_H_

#include <map>
#include <vector>

#include "vflsim/nn/matrix.h"

namespace vflsim {

// Labeled samples the adversary collected outside the training set, already
// restricted to the columns its participant hosts.
struct AuxiliarySet {
  RealMatrix samples;
  std::vector<int> labels;
  std::vector<int> known_classes;  // ascending

  std::map<int, std::size_t> PerClassCounts() const {
    std::map<int, std::size_t> counts;
    for (int y : labels) ++counts[y];
    return counts;
  }
};

}  // namespace vflsim

#endif  // VFLSIM_ADVERSARY_AUXILIARY_SET_H_
