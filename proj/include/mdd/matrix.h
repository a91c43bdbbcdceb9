// include/mdd/matrix.h

// Copyright 2026  The mdd-engine Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MDD_MATRIX_H_
#define MDD_MATRIX_H_

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "mdd/common.h"

namespace mdd {

// Dense row-major matrix of IEEE-754 doubles. Row vectors are 1xN.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0);

  static Matrix identity(int n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int64_t size() const { return static_cast<int64_t>(rows_) * cols_; }
  bool empty() const { return size() == 0; }

  double& operator()(int r, int c) { return data_[static_cast<int64_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<int64_t>(r) * cols_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double k);

double sigmoid(double x);
Matrix sigmoid(const Matrix& a);
Matrix relu(const Matrix& a);
Matrix tanh(const Matrix& a);

// Each row normalized to sum 1; -inf entries map to probability 0.
Matrix softmax_rows(const Matrix& a);
Matrix log_softmax_rows(const Matrix& a);

// 1xC column sums.
Matrix colsum(const Matrix& a);

}  // namespace mdd

#endif  // MDD_MATRIX_H_
