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
namespace {

std::vector<std::vector<double>> RandomDirections(std::size_t count,
                                                  std::size_t dim,
                                                  std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> dirs;
  while (dirs.size() < count) {
    std::vector<double> v(dim);
    for (double& x : v) x = normal(rng);
    // Gram-Schmidt while an orthogonal complement remains.
    if (dirs.size() < dim) {
      for (const auto& q : dirs) {
        double dot = 0.0;
        for (std::size_t k = 0; k < dim; ++k) dot += v[k] * q[k];
        for (std::size_t k = 0; k < dim; ++k) v[k] -= dot * q[k];
      }
    }
    const double norm = std::sqrt(SquaredNorm(v));
    if (norm < 1e-8) continue;
    for (double& x : v) x /= norm;
    dirs.push_back(std::move(v));
  }
  return dirs;
}

RealMatrix GridTemplate(const GridParams& params, std::mt19937_64& rng) {
  constexpr int kBumps = 4;
  const std::size_t h = params.height;
  const std::size_t w = params.width;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RealMatrix tmpl(h, w);
  // Alternate bumps between the left and right halves so that every vertical
  // strip sees part of the class pattern.
  for (int b = 0; b < kBumps; ++b) {
    const double half = static_cast<double>(w) / 2.0;
    const double cr = unit(rng) * static_cast<double>(h - 1);
    const double cc = (b % 2 == 0 ? 0.0 : half) + unit(rng) * (half - 1.0);
    const double sigma = 1.0 + 1.5 * unit(rng);
    const double amp = 0.5 + 0.5 * unit(rng);
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        const double dr = static_cast<double>(r) - cr;
        const double dc = static_cast<double>(c) - cc;
        tmpl(r, c) += amp * std::exp(-(dr * dr + dc * dc) / (2 * sigma * sigma));
      }
    }
  }
  double mx = 0.0;
  for (double v : tmpl.values()) mx = std::max(mx, v);
  if (mx > 0.0) {
    for (double& v : tmpl.values()) v /= mx;
  }
  return tmpl;
}

}  // namespace

Dataset GenerateBlobs(const BlobParams& params, std::mt19937_64& rng) {
  if (params.num_classes < 2 || params.dim < 2) {
    throw std::invalid_argument("GenerateBlobs: need >= 2 classes and dims");
  }
  const auto n_classes = static_cast<std::size_t>(params.num_classes);
  const auto dirs = RandomDirections(n_classes, params.dim, rng);
  const double radius = params.center_distance / std::sqrt(2.0);
  std::vector<std::vector<double>> centers(n_classes,
                                           std::vector<double>(params.dim));
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (c == 1) continue;
    for (std::size_t k = 0; k < params.dim; ++k) {
      centers[c][k] = radius * dirs[c][k];
    }
  }
  const double close = params.center_distance * params.close_pair_factor;
  for (std::size_t k = 0; k < params.dim; ++k) {
    centers[1][k] = centers[0][k] + close * dirs[1][k];
  }

  Dataset data;
  data.num_classes = params.num_classes;
  data.features = RealMatrix(n_classes * params.per_class, params.dim);
  data.labels.reserve(n_classes * params.per_class);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::size_t row = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t i = 0; i < params.per_class; ++i, ++row) {
      auto x = data.features.row(row);
      for (std::size_t k = 0; k < params.dim; ++k) {
        x[k] = centers[c][k] + params.spread * normal(rng);
      }
      data.labels.push_back(static_cast<int>(c));
    }
  }
  return data;
}

std::vector<RealMatrix> GridTemplates(const GridParams& params,
                                      std::mt19937_64& rng) {
  std::vector<RealMatrix> templates;
  for (int c = 0; c < params.num_classes; ++c) {
    templates.push_back(GridTemplate(params, rng));
  }
  // Right half: a pattern shared by every class, with `right_signal` of each
  // class's own pattern mixed back in. Left half: class 1 is pulled toward
  // class 0 by `close_pair_factor`.
  const RealMatrix shared = GridTemplate(params, rng);
  const double mix = params.close_pair_factor;
  const double keep = params.right_signal;
  const std::size_t half = params.width / 2;
  const RealMatrix base = templates[0];
  for (std::size_t k = 0; k < templates.size(); ++k) {
    RealMatrix& own = templates[k];
    for (std::size_t r = 0; r < params.height; ++r) {
      for (std::size_t c = 0; c < params.width; ++c) {
        if (c >= half) {
          own(r, c) = (1.0 - keep) * shared(r, c) + keep * own(r, c);
        } else if (k == 1) {
          own(r, c) = (1.0 - mix) * base(r, c) + mix * own(r, c);
        }
      }
    }
  }
  return templates;
}

Dataset GenerateGridImages(const GridParams& params, std::mt19937_64& rng) {
  if (params.num_classes < 2) {
    throw std::invalid_argument("GenerateGridImages: need >= 2 classes");
  }
  if (params.height < 6 || params.width < 6) {
    throw std::invalid_argument("GenerateGridImages: grid must be at least 6x6");
  }
  const GridShape shape{params.height, params.width};
  const auto templates = GridTemplates(params, rng);
  Dataset data;
  data.num_classes = params.num_classes;
  data.grid = shape;
  const auto n_classes = static_cast<std::size_t>(params.num_classes);
  data.features = RealMatrix(n_classes * params.per_class, shape.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::size_t row = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t i = 0; i < params.per_class; ++i, ++row) {
      auto x = data.features.row(row);
      for (std::size_t col = 0; col < shape.width; ++col) {
        for (std::size_t r = 0; r < shape.height; ++r) {
          double v = templates[c](r, col);
          if (params.noise > 0.0) v += params.noise * normal(rng);
          x[shape.Index(r, col)] = std::clamp(v, 0.0, 1.0);
        }
      }
      data.labels.push_back(static_cast<int>(c));
    }
  }
  return data;
}

}  // namespace vflsim
