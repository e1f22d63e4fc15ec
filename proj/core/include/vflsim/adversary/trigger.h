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

#ifndef VFLSIM_ADVERSARY_TRIGGER_H_
#define VFLSIM_ADVERSARY_TRIGGER_H_

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "vflsim/nn/matrix.h"
#include "vflsim/vfl/feature_shard.h"

namespace vflsim {

// Rectangle on a participant's grid strip; top-left at (row, col).
struct Window {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t area() const { return height * width; }
  friend bool operator==(const Window&, const Window&) = default;
};

enum class TriggerMode { kGridPatch, kTabularOverwrite };
enum class FillPattern { kConstant, kCheckerboard };

// The backdoor trigger. Grid patches carry only their size and fill; where
// they land is a separate Window chosen per participant.
struct TriggerSpec {
  TriggerMode mode = TriggerMode::kGridPatch;

  // Grid patch.
  std::size_t height = 0;
  std::size_t width = 0;
  FillPattern pattern = FillPattern::kConstant;
  double fill = 1.0;
  double fill_alt = 0.0;  // second checkerboard colour
  // Column offset of this patch inside the undivided trigger, so that the
  // checkerboard phase survives a split.
  std::size_t column_phase = 0;

  // Tabular overwrite, indices relative to the participant's slice.
  std::vector<std::size_t> indices;
  // NaN until chosen; the attack sets it from the shard's value range.
  double tabular_fill = std::numeric_limits<double>::quiet_NaN();

  // Value written at patch cell (r, c).
  double PatchValue(std::size_t r, std::size_t c) const;
};

// A trigger together with the participant and window it applies to.
struct PlacedTrigger {
  int participant_id = 0;
  TriggerSpec spec;
  Window window;
  std::optional<GridShape> grid;  // shape of the participant's strip
};

// Top-left corner of the height x width window with the largest mean
// saliency, scanning with stride 1. Ties resolve to the smallest (row, col)
// in row-major order. `saliency` is laid out like the grid (column-major).
Window PlanTriggerWindow(std::span<const double> saliency, const GridShape& grid,
                         std::size_t height, std::size_t width);

// Returns a triggered copy of `slice`. Grid patches overwrite the window
// cells; tabular triggers overwrite the listed features.
std::vector<double> ApplyTrigger(std::span<const double> slice,
                                 const std::optional<GridShape>& grid,
                                 const TriggerSpec& spec, const Window& window);
RealMatrix ApplyTriggerRows(const RealMatrix& rows,
                            const std::optional<GridShape>& grid,
                            const TriggerSpec& spec, const Window& window);

// Column-wise split of a grid patch into `parts` contiguous pieces, widest
// first (ceil(w / parts)); tabular index sets split in ascending order.
std::vector<TriggerSpec> SplitTrigger(const TriggerSpec& spec,
                                      std::size_t parts);

// Windows of consecutive pieces when the undivided window sits at `window` on
// the concatenation of the attackers' strips (coordinates in that joint grid).
std::vector<Window> SplitWindow(const Window& window,
                                std::span<const TriggerSpec> pieces);

}  // namespace vflsim

#endif  // VFLSIM_ADVERSARY_TRIGGER_H_
