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

#include "vflsim/nn/matrix.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vflsim {

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw std::invalid_argument("RealMatrix: " + std::to_string(rows) + "x" +
                                std::to_string(cols) + " needs " +
                                std::to_string(rows * cols) + " values, got " +
                                std::to_string(values_.size()));
  }
}

RealMatrix::RealMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  values_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw std::invalid_argument("RealMatrix: ragged initializer");
    }
    values_.insert(values_.end(), r.begin(), r.end());
  }
}

RealMatrix RealMatrix::GatherRows(std::span<const std::size_t> ids) const {
  RealMatrix out(ids.size(), cols_);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= rows_) {
      throw std::out_of_range("GatherRows: row " + std::to_string(ids[i]) +
                              " outside " + ShapeString());
    }
    std::copy_n(values_.data() + ids[i] * cols_, cols_,
                out.values_.data() + i * cols_);
  }
  return out;
}

RealMatrix RealMatrix::ColumnSlice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > cols_) {
    throw std::out_of_range("ColumnSlice: [" + std::to_string(begin) + ", " +
                            std::to_string(end) + ") outside " + ShapeString());
  }
  RealMatrix out(rows_, end - begin);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::copy(values_.begin() + r * cols_ + begin,
              values_.begin() + r * cols_ + end,
              out.values_.begin() + r * out.cols_);
  }
  return out;
}

void RealMatrix::SetColumns(std::size_t begin, const RealMatrix& block) {
  if (block.rows_ != rows_ || begin + block.cols_ > cols_) {
    throw std::out_of_range("SetColumns: block " + block.ShapeString() +
                            " at column " + std::to_string(begin) +
                            " does not fit " + ShapeString());
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    std::copy_n(block.values_.data() + r * block.cols_, block.cols_,
                values_.data() + r * cols_ + begin);
  }
}

bool RealMatrix::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string RealMatrix::ShapeString() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

RealMatrix ConcatColumns(std::span<const RealMatrix> blocks) {
  if (blocks.empty()) return {};
  const std::size_t rows = blocks.front().rows();
  std::size_t cols = 0;
  for (const auto& b : blocks) {
    if (b.rows() != rows) {
      throw std::invalid_argument("ConcatColumns: row count mismatch (" +
                                  std::to_string(rows) + " vs " +
                                  std::to_string(b.rows()) + ")");
    }
    cols += b.cols();
  }
  RealMatrix out(rows, cols);
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    out.SetColumns(offset, b);
    offset += b.cols();
  }
  return out;
}

void RequireSameShape(const RealMatrix& a, const RealMatrix& b,
                      const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                a.ShapeString() + " vs " + b.ShapeString());
  }
}

double SquaredNorm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace vflsim
