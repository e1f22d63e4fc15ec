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

#include "vflsim/adversary/trigger.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vflsim {

double TriggerSpec::PatchValue(std::size_t r, std::size_t c) const {
  if (pattern == FillPattern::kConstant) return fill;
  return (r + c + column_phase) % 2 == 0 ? fill : fill_alt;
}

Window PlanTriggerWindow(std::span<const double> saliency, const GridShape& grid,
                         std::size_t height, std::size_t width) {
  if (saliency.size() != grid.size()) {
    throw std::invalid_argument("PlanTriggerWindow: saliency has " +
                                std::to_string(saliency.size()) +
                                " cells, grid has " +
                                std::to_string(grid.size()));
  }
  if (height == 0 || width == 0 || height > grid.height || width > grid.width) {
    throw std::invalid_argument(
        "PlanTriggerWindow: window " + std::to_string(height) + "x" +
        std::to_string(width) + " does not fit grid " +
        std::to_string(grid.height) + "x" + std::to_string(grid.width));
  }
  Window best{0, 0, height, width};
  double best_sum = -1.0;
  for (std::size_t r = 0; r + height <= grid.height; ++r) {
    for (std::size_t c = 0; c + width <= grid.width; ++c) {
      double sum = 0.0;
      for (std::size_t dc = 0; dc < width; ++dc) {
        for (std::size_t dr = 0; dr < height; ++dr) {
          sum += saliency[grid.Index(r + dr, c + dc)];
        }
      }
      // Equal-area windows: comparing sums compares means.
      if (sum > best_sum) {
        best_sum = sum;
        best.row = r;
        best.col = c;
      }
    }
  }
  return best;
}

std::vector<double> ApplyTrigger(std::span<const double> slice,
                                 const std::optional<GridShape>& grid,
                                 const TriggerSpec& spec, const Window& window) {
  std::vector<double> out(slice.begin(), slice.end());
  if (spec.mode == TriggerMode::kTabularOverwrite) {
    if (!std::isfinite(spec.tabular_fill) && !spec.indices.empty()) {
      throw std::invalid_argument("ApplyTrigger: tabular fill is not set");
    }
    for (std::size_t idx : spec.indices) {
      if (idx >= out.size()) {
        throw std::out_of_range("ApplyTrigger: feature index " +
                                std::to_string(idx) + " outside slice of " +
                                std::to_string(out.size()));
      }
      out[idx] = spec.tabular_fill;
    }
    return out;
  }
  if (window.area() == 0) return out;
  if (!grid || grid->size() != slice.size()) {
    throw std::invalid_argument("ApplyTrigger: grid patch needs the slice's "
                                "grid shape");
  }
  if (window.row + window.height > grid->height ||
      window.col + window.width > grid->width) {
    throw std::out_of_range(
        "ApplyTrigger: window at (" + std::to_string(window.row) + ", " +
        std::to_string(window.col) + ") size " + std::to_string(window.height) +
        "x" + std::to_string(window.width) + " leaves grid " +
        std::to_string(grid->height) + "x" + std::to_string(grid->width));
  }
  for (std::size_t dc = 0; dc < window.width; ++dc) {
    for (std::size_t dr = 0; dr < window.height; ++dr) {
      out[grid->Index(window.row + dr, window.col + dc)] =
          spec.PatchValue(dr, dc);
    }
  }
  return out;
}

RealMatrix ApplyTriggerRows(const RealMatrix& rows,
                            const std::optional<GridShape>& grid,
                            const TriggerSpec& spec, const Window& window) {
  RealMatrix out(rows.rows(), rows.cols());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    const std::vector<double> t = ApplyTrigger(rows.row(i), grid, spec, window);
    std::copy(t.begin(), t.end(), out.row(i).begin());
  }
  return out;
}

std::vector<TriggerSpec> SplitTrigger(const TriggerSpec& spec,
                                      std::size_t parts) {
  if (parts == 0) {
    throw std::invalid_argument("SplitTrigger: need at least one part");
  }
  std::vector<TriggerSpec> out;
  if (spec.mode == TriggerMode::kTabularOverwrite) {
    if (parts > spec.indices.size()) {
      throw std::invalid_argument(
          "SplitTrigger: " + std::to_string(parts) + " parts exceed " +
          std::to_string(spec.indices.size()) + " trigger features");
    }
    std::vector<std::size_t> sorted = spec.indices;
    std::sort(sorted.begin(), sorted.end());
    std::size_t begin = 0;
    for (std::size_t p = 0; p < parts; ++p) {
      const std::size_t remaining = sorted.size() - begin;
      const std::size_t take = (remaining + (parts - p) - 1) / (parts - p);
      TriggerSpec piece = spec;
      piece.indices.assign(sorted.begin() + begin, sorted.begin() + begin + take);
      out.push_back(std::move(piece));
      begin += take;
    }
    return out;
  }
  if (parts > spec.width) {
    throw std::invalid_argument("SplitTrigger: " + std::to_string(parts) +
                                " parts exceed trigger width " +
                                std::to_string(spec.width));
  }
  std::size_t begin = 0;
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t remaining = spec.width - begin;
    const std::size_t take = (remaining + (parts - p) - 1) / (parts - p);
    TriggerSpec piece = spec;
    piece.width = take;
    piece.column_phase = spec.column_phase + begin;
    out.push_back(piece);
    begin += take;
  }
  return out;
}

std::vector<Window> SplitWindow(const Window& window,
                                std::span<const TriggerSpec> pieces) {
  std::vector<Window> out;
  std::size_t col = window.col;
  for (const TriggerSpec& piece : pieces) {
    out.push_back({window.row, col, window.height, piece.width});
    col += piece.width;
  }
  return out;
}

}  // namespace vflsim
