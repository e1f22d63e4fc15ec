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

#ifndef VFLSIM_VFL_FEATURE_SHARD_H_
#define VFLSIM_VFL_FEATURE_SHARD_H_

#include <cstddef>
#include <optional>

#include "vflsim/nn/matrix.h"

namespace vflsim {

// Half-open column interval [begin, end) of the global feature space.
struct ColumnRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t width() const { return end - begin; }
  friend bool operator==(const ColumnRange&, const ColumnRange&) = default;
};

// Grid samples are flattened column-major (feature = col * height + row), so
// a strip of whole pixel columns is a contiguous feature range.
struct GridShape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t size() const { return height * width; }
  std::size_t Index(std::size_t row, std::size_t col) const {
    return col * height + row;
  }
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

// One participant's vertical slice of a feature matrix.
struct FeatureShard {
  int participant_id = 0;
  ColumnRange columns;
  RealMatrix rows;                 // n x columns.width()
  std::optional<GridShape> grid;   // set when the slice is an image strip
};

}  // namespace vflsim

#endif  // VFLSIM_VFL_FEATURE_SHARD_H_
