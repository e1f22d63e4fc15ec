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

#ifndef VFLSIM_NN_MATRIX_H_
#define VFLSIM_NN_MATRIX_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace vflsim {

// Dense row-major matrix of doubles. Rows are samples throughout the library.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  RealMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  // Rows selected by index, in the given order.
  RealMatrix GatherRows(std::span<const std::size_t> ids) const;
  // Columns [begin, end).
  RealMatrix ColumnSlice(std::size_t begin, std::size_t end) const;
  // Writes `block` into columns starting at `begin`.
  void SetColumns(std::size_t begin, const RealMatrix& block);

  bool AllFinite() const;
  std::string ShapeString() const;

  friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Horizontal concatenation; all blocks must share a row count.
RealMatrix ConcatColumns(std::span<const RealMatrix> blocks);

// Throws std::invalid_argument with both shapes when they differ.
void RequireSameShape(const RealMatrix& a, const RealMatrix& b,
                      const char* what);

double SquaredNorm(std::span<const double> v);

}  // namespace vflsim

#endif  // VFLSIM_NN_MATRIX_H_
