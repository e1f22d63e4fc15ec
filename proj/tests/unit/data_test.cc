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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "vflsim/data/dataset.h"
#include "vflsim/nn/dense_net.h"

namespace vflsim {
namespace {

using ::testing::HasSubstr;

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("vflsim_data_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter_++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string File(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

TEST(BlobsTest, ZeroSpreadGivesCenters) {
  BlobParams p;
  p.spread = 0.0;
  p.per_class = 5;
  std::mt19937_64 rng(1);
  const Dataset d = GenerateBlobs(p, rng);
  for (int c = 0; c < p.num_classes; ++c) {
    const auto ids = d.IdsOfClass(c);
    for (std::size_t id : ids) {
      for (std::size_t f = 0; f < p.dim; ++f) {
        EXPECT_EQ(d.features(id, f), d.features(ids[0], f));
      }
    }
  }
}

TEST(BlobsTest, ExactPerClassCounts) {
  BlobParams p;
  p.per_class = 37;
  std::mt19937_64 rng(2);
  const Dataset d = GenerateBlobs(p, rng);
  EXPECT_EQ(d.size(), 37u * 4);
  for (int c = 0; c < 4; ++c) EXPECT_EQ(d.IdsOfClass(c).size(), 37u);
}

TEST(BlobsTest, PlantedPairIsTheClosestCenterPair) {
  BlobParams p;
  p.spread = 0.0;
  p.per_class = 1;
  p.close_pair_factor = 0.5;
  std::mt19937_64 rng(3);
  const Dataset d = GenerateBlobs(p, rng);
  double best = 1e300;
  std::pair<int, int> arg;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      std::vector<double> diff(p.dim);
      for (std::size_t f = 0; f < p.dim; ++f) diff[f] = d.features(a, f) - d.features(b, f);
      const double dist = std::sqrt(SquaredNorm(diff));
      if (dist < best) {
        best = dist;
        arg = {a, b};
      }
      if (a == 0 && b == 1) {
        EXPECT_NEAR(dist, 4.0, 1e-9);
      } else if (a != 1 && b != 1) {
        EXPECT_NEAR(dist, 8.0, 1e-9) << a << "," << b;
      } else {
        EXPECT_GT(dist, 4.0) << a << "," << b;
      }
    }
  }
  EXPECT_EQ(arg, std::make_pair(0, 1));
}

// Softmax-regression probe trained from scratch as the separability oracle.
TEST(BlobsTest, WellSeparatedCentersAreLinearlySeparable) {
  BlobParams p;
  p.close_pair_factor = 1.0;
  p.center_distance = 6.0;
  p.spread = 1.0;
  std::mt19937_64 rng(4);
  const Dataset d = GenerateBlobs(p, rng);
  const std::size_t dims[] = {p.dim, 4};
  DenseNet probe = DenseNet::Glorot(dims, rng);
  for (int epoch = 0; epoch < 300; ++epoch) {
    const Activations acts = Forward(probe, d.features);
    const LossAndGrad lg = CrossEntropyWithGrad(acts.output(), d.labels);
    SgdStepInPlace(probe, Backward(probe, acts, lg.grad).param_grads, 0.5);
  }
  const std::vector<int> pred = ArgmaxRows(Forward(probe, d.features).output());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == d.labels[i];
  EXPECT_GE(static_cast<double>(hits) / static_cast<double>(pred.size()), 0.99);
}

TEST(GridTest, NoiseFreeImagesEqualTemplates) {
  GridParams p;
  p.noise = 0.0;
  p.per_class = 3;
  std::mt19937_64 rng(5);
  std::mt19937_64 copy = rng;
  const auto templates = GridTemplates(p, copy);
  const Dataset d = GenerateGridImages(p, rng);
  ASSERT_TRUE(d.grid.has_value());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const RealMatrix& t = templates[static_cast<std::size_t>(d.labels[i])];
    for (std::size_t r = 0; r < p.height; ++r) {
      for (std::size_t c = 0; c < p.width; ++c) {
        EXPECT_EQ(d.features(i, d.grid->Index(r, c)), t(r, c));
      }
    }
  }
}

TEST(GridTest, PixelsClampedToUnitInterval) {
  GridParams p;
  p.noise = 2.0;
  std::mt19937_64 rng(6);
  const Dataset d = GenerateGridImages(p, rng);
  for (double v : d.features.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(GridTest, NearestTemplateClassifierAtLowNoise) {
  GridParams p;
  p.noise = 0.1;
  std::mt19937_64 rng(7);
  std::mt19937_64 copy = rng;
  const auto templates = GridTemplates(p, copy);
  const Dataset d = GenerateGridImages(p, rng);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double best = 1e300;
    int arg = -1;
    for (std::size_t k = 0; k < templates.size(); ++k) {
      double dist = 0.0;
      for (std::size_t r = 0; r < p.height; ++r) {
        for (std::size_t c = 0; c < p.width; ++c) {
          const double diff = d.features(i, d.grid->Index(r, c)) - templates[k](r, c);
          dist += diff * diff;
        }
      }
      if (dist < best) {
        best = dist;
        arg = static_cast<int>(k);
      }
    }
    hits += arg == d.labels[i];
  }
  EXPECT_GE(static_cast<double>(hits) / static_cast<double>(d.size()), 0.95);
}

TEST(GridTest, RightHalfSignalControlsClassContrast) {
  GridParams p;
  p.right_signal = 0.0;
  std::mt19937_64 rng(8);
  const auto t = GridTemplates(p, rng);
  for (std::size_t k = 1; k < t.size(); ++k) {
    for (std::size_t r = 0; r < p.height; ++r) {
      for (std::size_t c = p.width / 2; c < p.width; ++c) {
        EXPECT_EQ(t[k](r, c), t[0](r, c));
      }
    }
  }
}

TEST(GridTest, RejectsTooSmallGrid) {
  GridParams p;
  p.width = 5;
  std::mt19937_64 rng(1);
  EXPECT_THROW(GenerateGridImages(p, rng), std::invalid_argument);
}

TEST(GenerationTest, SameSeedBitwiseIdentical) {
  std::mt19937_64 a(9), b(9);
  EXPECT_EQ(GenerateGridImages({}, a).features, GenerateGridImages({}, b).features);
  std::mt19937_64 c(9), d(9);
  const Dataset x = GenerateBlobs({}, c);
  const Dataset y = GenerateBlobs({}, d);
  EXPECT_EQ(x.features, y.features);
  EXPECT_EQ(x.labels, y.labels);
}

TEST(SplitTrainTestTest, StratifiedAndDisjoint) {
  BlobParams p;
  p.per_class = 20;
  std::mt19937_64 rng(10);
  Dataset d = GenerateBlobs(p, rng);
  // Tag each row by its id in the first feature to track provenance.
  for (std::size_t i = 0; i < d.size(); ++i) d.features(i, 0) = static_cast<double>(i);
  const TrainTestSplit s = SplitTrainTest(d, 5, rng);
  EXPECT_EQ(s.test.size(), 20u);
  EXPECT_EQ(s.train.size(), 60u);
  std::set<double> train_ids, test_ids;
  for (std::size_t i = 0; i < s.train.size(); ++i) train_ids.insert(s.train.features(i, 0));
  for (std::size_t i = 0; i < s.test.size(); ++i) test_ids.insert(s.test.features(i, 0));
  for (double id : test_ids) EXPECT_EQ(train_ids.count(id), 0u);
  for (int c = 0; c < 4; ++c) EXPECT_EQ(s.test.IdsOfClass(c).size(), 5u);
}

TEST(SplitPlanTest, EqualWidths) {
  const SplitPlan plan = SplitPlan::Equal(6, 3, std::nullopt, {});
  ASSERT_EQ(plan.ranges.size(), 3u);
  for (const ColumnRange& r : plan.ranges) EXPECT_EQ(r.width(), 2u);
  const SplitPlan uneven = SplitPlan::Equal(7, 3, std::nullopt, {});
  EXPECT_EQ(uneven.ranges[0].width(), 3u);
  EXPECT_EQ(uneven.ranges[2].width(), 2u);
}

TEST(SplitPlanTest, GridHalvesFollowPixelColumns) {
  const GridShape g{4, 8};
  const SplitPlan plan = SplitPlan::Equal(32, 2, g, {0});
  EXPECT_EQ(plan.ranges[0], (ColumnRange{0, 16}));  // pixel columns [0, 4)
  EXPECT_EQ(plan.ranges[1], (ColumnRange{16, 32}));  // pixel columns [4, 8)
  EXPECT_TRUE(plan.IsAdversary(0));
  EXPECT_FALSE(plan.IsAdversary(1));
}

TEST(SplitPlanTest, RejectsBrokenPlans) {
  SplitPlan overlap;
  overlap.ranges = {{0, 4}, {3, 6}};
  EXPECT_THROW(ValidateSplitPlan(overlap, 6, std::nullopt), std::invalid_argument);
  SplitPlan gap;
  gap.ranges = {{0, 2}, {3, 6}};
  EXPECT_THROW(ValidateSplitPlan(gap, 6, std::nullopt), std::invalid_argument);
  SplitPlan short_plan;
  short_plan.ranges = {{0, 2}, {2, 5}};
  EXPECT_THROW(ValidateSplitPlan(short_plan, 6, std::nullopt), std::invalid_argument);
  SplitPlan cut;
  cut.ranges = {{0, 6}, {6, 16}};
  EXPECT_THROW(ValidateSplitPlan(cut, 16, GridShape{4, 4}), std::invalid_argument);
  SplitPlan bad_adv;
  bad_adv.ranges = {{0, 6}};
  bad_adv.adversary_ids = {1};
  EXPECT_THROW(ValidateSplitPlan(bad_adv, 6, std::nullopt), std::invalid_argument);
}

TEST(VerticalSplitTest, ConcatenationReconstructsFeatures) {
  std::mt19937_64 rng(11);
  for (std::size_t k = 1; k <= 5; ++k) {
    std::mt19937_64 data_rng(k);
    const Dataset d = GenerateGridImages({}, data_rng);
    const SplitPlan plan = SplitPlan::Equal(d.dim(), k, d.grid, {});
    const auto shards = VerticalSplit(d.features, plan, d.grid);
    std::vector<RealMatrix> blocks;
    for (const FeatureShard& s : shards) {
      blocks.push_back(s.rows);
      ASSERT_TRUE(s.grid.has_value());
      EXPECT_EQ(s.grid->height, 12u);
      EXPECT_EQ(s.grid->size(), s.columns.width());
    }
    EXPECT_EQ(ConcatColumns(blocks), d.features);
  }
}

TEST(AuxiliaryTest, FullOverlapCounts) {
  BlobParams p;
  p.per_class = 100;
  std::mt19937_64 rng(12);
  const Dataset d = GenerateBlobs(p, rng);
  const AuxiliarySplit aux = SampleAuxiliary(d, 40, 1.0, rng);
  EXPECT_EQ(aux.aux.size(), 160u);
  EXPECT_EQ(aux.known_classes, (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(aux.remaining.size(), 240u);
}

TEST(AuxiliaryTest, PartialOverlapKnownClasses) {
  BlobParams p;
  p.num_classes = 10;
  p.per_class = 50;
  std::mt19937_64 rng(13);
  const Dataset d = GenerateBlobs(p, rng);
  const AuxiliarySplit aux = SampleAuxiliary(d, 10, 0.7, rng);
  EXPECT_EQ(aux.known_classes.size(), 7u);
  for (int y : aux.aux.labels) {
    EXPECT_TRUE(std::binary_search(aux.known_classes.begin(), aux.known_classes.end(), y));
  }
}

TEST(AuxiliaryTest, DisjointFromTrainingPool) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    const Dataset d = GenerateBlobs({}, rng);
    const AuxiliarySplit aux = SampleAuxiliary(d, 30, 0.5, rng);
    std::vector<std::size_t> both;
    std::set_intersection(aux.aux_ids.begin(), aux.aux_ids.end(),
                          aux.remaining_ids.begin(), aux.remaining_ids.end(),
                          std::back_inserter(both));
    EXPECT_TRUE(both.empty());
    EXPECT_EQ(aux.aux_ids.size() + aux.remaining_ids.size(), d.size());
  }
}

TEST(AuxiliaryTest, RejectsOversizedRequestAndBadFraction) {
  BlobParams p;
  p.per_class = 10;
  std::mt19937_64 rng(14);
  const Dataset d = GenerateBlobs(p, rng);
  EXPECT_THROW(SampleAuxiliary(d, 11, 1.0, rng), std::invalid_argument);
  EXPECT_THROW(SampleAuxiliary(d, 5, 0.0, rng), std::invalid_argument);
  EXPECT_THROW(SampleAuxiliary(d, 5, 1.5, rng), std::invalid_argument);
}

TEST(AuxiliaryTest, ParticipantSliceKeepsOnlyOwnColumns) {
  std::mt19937_64 rng(15);
  const Dataset d = GenerateBlobs({}, rng);
  const AuxiliarySplit aux = SampleAuxiliary(d, 5, 1.0, rng);
  const AuxiliarySet set = MakeAuxiliarySet(aux, {4, 9});
  EXPECT_EQ(set.samples, aux.aux.features.ColumnSlice(4, 9));
  EXPECT_EQ(set.labels, aux.aux.labels);
  EXPECT_EQ(set.PerClassCounts().at(2), 5u);
}

TEST(CsvTest, WellFormedFile) {
  TempDir dir;
  const std::string path = dir.File("two.csv");
  WriteText(path, "label,f0,f1\n0,1.5,2\n1,-3,4e-2\n");
  const Dataset d = LoadCsv(path, LoadCsvSchema(path));
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(d.num_classes, 2);
  EXPECT_EQ(d.features, (RealMatrix{{1.5, 2}, {-3, 0.04}}));
}

TEST(CsvTest, RaggedRowNamesLine) {
  TempDir dir;
  const std::string path = dir.File("ragged.csv");
  WriteText(path, "label,f0,f1\n0,1,2\n1,3\n");
  try {
    LoadCsv(path, {});
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_THAT(e.what(), HasSubstr(":3"));
  }
}

TEST(CsvTest, NonNumericCellNamesPosition) {
  TempDir dir;
  const std::string path = dir.File("text.csv");
  WriteText(path, "label,f0,f1\n0,1,abc\n");
  try {
    LoadCsv(path, {});
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_THAT(e.what(), HasSubstr("'abc'"));
    EXPECT_THAT(e.what(), HasSubstr(":2 column 2"));
  }
}

TEST(CsvTest, MissingFileAndLabelRange) {
  TempDir dir;
  EXPECT_THROW(LoadCsv(dir.File("absent.csv"), {}), std::runtime_error);
  const std::string path = dir.File("range.csv");
  WriteText(path, "label,f0\n0,1\n5,2\n");
  CsvSchema schema;
  schema.num_classes = 3;
  EXPECT_THROW(LoadCsv(path, schema), std::invalid_argument);
}

TEST(CsvTest, SidecarCarriesGridAndClassCount) {
  TempDir dir;
  const std::string path = dir.File("grid.csv");
  std::string text = "label";
  for (int i = 0; i < 36; ++i) text += ",p" + std::to_string(i);
  text += "\n";
  for (int row = 0; row < 3; ++row) {
    text += std::to_string(row);
    for (int i = 0; i < 36; ++i) text += ",0.5";
    text += "\n";
  }
  WriteText(path, text);
  WriteText(path + ".meta.json", R"({"num_classes": 5, "grid_height": 6, "grid_width": 6})");
  const Dataset d = LoadCsv(path, LoadCsvSchema(path));
  EXPECT_EQ(d.num_classes, 5);
  ASSERT_TRUE(d.grid.has_value());
  EXPECT_EQ(*d.grid, (GridShape{6, 6}));
}

TEST(CsvTest, WriteThenLoadRoundTripsExactly) {
  TempDir dir;
  const std::string path = dir.File("round.csv");
  std::mt19937_64 rng(16);
  BlobParams p;
  p.per_class = 25;
  const Dataset d = GenerateBlobs(p, rng);
  WriteCsv(d, path);
  const Dataset back = LoadCsv(path, LoadCsvSchema(path));
  EXPECT_EQ(back.features, d.features);
  EXPECT_EQ(back.labels, d.labels);
}

TEST(DatasetTest, ValidateRejectsBadContent) {
  Dataset d;
  d.features = RealMatrix{{1.0}, {2.0}};
  d.labels = {0, 2};
  d.num_classes = 2;
  EXPECT_THROW(d.Validate(), std::invalid_argument);
  d.labels = {0, 1};
  d.features(0, 0) = std::nan("");
  EXPECT_THROW(d.Validate(), std::invalid_argument);
  d.features(0, 0) = 1.0;
  d.grid = GridShape{2, 2};
  EXPECT_THROW(d.Validate(), std::invalid_argument);
}

}  // namespace
}  // namespace vflsim
