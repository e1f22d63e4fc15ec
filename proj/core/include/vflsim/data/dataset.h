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

#ifndef VFLSIM_DATA_DATASET_H_
#define VFLSIM_DATA_DATASET_H_

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "vflsim/adversary/auxiliary_set.h"
#include "vflsim/nn/matrix.h"
#include "vflsim/vfl/feature_shard.h"

namespace vflsim {

struct Dataset {
  RealMatrix features;  // n x m
  std::vector<int> labels;
  int num_classes = 0;
  std::optional<GridShape> grid;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.cols(); }

  // Throws std::invalid_argument on non-finite features, label range or a
  // grid shape that does not cover the feature width.
  void Validate() const;
  Dataset Subset(std::span<const std::size_t> ids) const;
  std::vector<std::size_t> IdsOfClass(int label) const;
};

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

// Stratified: `test_per_class` samples of every class go to the test side.
TrainTestSplit SplitTrainTest(const Dataset& data, std::size_t test_per_class,
                              std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Synthetic generators.

struct BlobParams {
  int num_classes = 4;
  std::size_t dim = 16;
  std::size_t per_class = 375;
  double spread = 1.0;
  // Distance between ordinary class centers.
  double center_distance = 8.0;
  // Classes 0 and 1 sit at center_distance * close_pair_factor.
  double close_pair_factor = 0.75;
};

// Centers lie along random orthonormal directions so that every feature
// carries class signal; samples are center + N(0, spread^2).
Dataset GenerateBlobs(const BlobParams& params, std::mt19937_64& rng);

struct GridParams {
  int num_classes = 4;
  std::size_t height = 12;
  std::size_t width = 12;
  std::size_t per_class = 400;
  double noise = 0.2;
  // Left half of template 1 = (1 - f) * template 0 + f * its own pattern.
  double close_pair_factor = 0.5;
  // Share of each class's own pattern kept in the right half; the rest is a
  // background common to all classes.
  double right_signal = 0.2;
};

// One template per class in label order, each a sum of Gaussian bumps
// scaled to [0, 1], drawn from `rng`.
std::vector<RealMatrix> GridTemplates(const GridParams& params,
                                      std::mt19937_64& rng);
// Image = template + N(0, noise^2) per pixel, clamped to [0, 1].
Dataset GenerateGridImages(const GridParams& params, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Vertical partitioning.

struct SplitPlan {
  std::vector<ColumnRange> ranges;  // ordered by participant id
  std::vector<int> adversary_ids;

  std::size_t num_participants() const { return ranges.size(); }
  bool IsAdversary(int id) const;

  // K near-equal ranges over m features; the first (m % K) get one extra.
  // For grid data the unit is a whole pixel column.
  static SplitPlan Equal(std::size_t num_features, std::size_t num_parties,
                         const std::optional<GridShape>& grid,
                         std::vector<int> adversary_ids);
};

// Throws std::invalid_argument for overlapping, unordered or incomplete
// ranges, or strips that cut through a pixel column.
void ValidateSplitPlan(const SplitPlan& plan, std::size_t num_features,
                       const std::optional<GridShape>& grid);

std::vector<FeatureShard> VerticalSplit(const RealMatrix& features,
                                        const SplitPlan& plan,
                                        const std::optional<GridShape>& grid);

// ---------------------------------------------------------------------------
// Auxiliary data.

struct AuxiliarySplit {
  Dataset aux;                            // full feature width
  Dataset remaining;                      // training pool minus aux rows
  std::vector<std::size_t> aux_ids;       // ids in the input dataset
  std::vector<std::size_t> remaining_ids;
  std::vector<int> known_classes;         // ascending
};

// Draws `per_class` labeled samples from each of ceil(fraction * N) uniformly
// chosen classes and removes them from the training pool.
AuxiliarySplit SampleAuxiliary(const Dataset& data, std::size_t per_class,
                               double known_fraction, std::mt19937_64& rng);

// Restricts auxiliary samples to one participant's columns.
AuxiliarySet MakeAuxiliarySet(const AuxiliarySplit& split,
                              const ColumnRange& columns);

// ---------------------------------------------------------------------------
// CSV ingestion. Header `label,f0,f1,...`; optional sidecar `<path>.meta.json`
// with {"num_classes": N, "grid_height": h, "grid_width": w}.

struct CsvSchema {
  std::string label_column = "label";
  std::vector<std::string> feature_columns;  // empty: every other column
  int num_classes = 0;                       // 0: max label + 1
  std::optional<GridShape> grid;
};

// Reads the sidecar next to `csv_path` if present, else the default schema.
CsvSchema LoadCsvSchema(const std::string& csv_path);
Dataset LoadCsv(const std::string& path, const CsvSchema& schema);
void WriteCsv(const Dataset& data, const std::string& path);

}  // namespace vflsim

#endif  // VFLSIM_DATA_DATASET_H_
