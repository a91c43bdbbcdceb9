// src/matrix.cc

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

#include "mdd/matrix.h"

#include <cmath>
#include <limits>

namespace mdd {

Matrix::Matrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
  require(rows >= 0 && cols >= 0, "matrix dimensions must be non-negative");
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  int nr = static_cast<int>(rows.size());
  int nc = nr == 0 ? 0 : static_cast<int>(rows.begin()->size());
  Matrix m(nr, nc);
  int r = 0;
  for (const auto& row : rows) {
    require(static_cast<int>(row.size()) == nc, "ragged initializer");
    int c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(),
          str_cat("matmul shape mismatch: ", a.rows(), "x", a.cols(), " * ",
                  b.rows(), "x", b.cols()));
  Matrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "add shape mismatch");
  Matrix out = a;
  for (int64_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "sub shape mismatch");
  Matrix out = a;
  for (int64_t i = 0; i < out.size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "hadamard shape mismatch");
  Matrix out = a;
  for (int64_t i = 0; i < out.size(); ++i) out.data()[i] *= b.data()[i];
  return out;
}

Matrix scale(const Matrix& a, double k) {
  Matrix out = a;
  for (int64_t i = 0; i < out.size(); ++i) out.data()[i] *= k;
  return out;
}

double sigmoid(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix sigmoid(const Matrix& a) {
  Matrix out = a;
  for (int64_t i = 0; i < out.size(); ++i) out.data()[i] = sigmoid(out.data()[i]);
  return out;
}

Matrix relu(const Matrix& a) {
  Matrix out = a;
  for (int64_t i = 0; i < out.size(); ++i)
    if (out.data()[i] < 0) out.data()[i] = 0;
  return out;
}

Matrix tanh(const Matrix& a) {
  Matrix out = a;
  for (int64_t i = 0; i < out.size(); ++i) out.data()[i] = std::tanh(out.data()[i]);
  return out;
}

Matrix softmax_rows(const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < a.cols(); ++j) mx = std::max(mx, a(i, j));
    require(mx != -std::numeric_limits<double>::infinity(),
            "softmax row with all -inf entries");
    double sum = 0.0;
    for (int j = 0; j < a.cols(); ++j) {
      double e = std::exp(a(i, j) - mx);
      out(i, j) = e;
      sum += e;
    }
    for (int j = 0; j < a.cols(); ++j) out(i, j) /= sum;
  }
  return out;
}

Matrix log_softmax_rows(const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < a.cols(); ++j) mx = std::max(mx, a(i, j));
    require(mx != -std::numeric_limits<double>::infinity(),
            "log-softmax row with all -inf entries");
    double sum = 0.0;
    for (int j = 0; j < a.cols(); ++j) sum += std::exp(a(i, j) - mx);
    double lse = mx + std::log(sum);
    for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - lse;
  }
  return out;
}

Matrix colsum(const Matrix& a) {
  Matrix out(1, a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(0, j) += a(i, j);
  return out;
}

}  // namespace mdd
