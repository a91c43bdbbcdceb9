// include/mdd/autodiff.h

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

#ifndef MDD_AUTODIFF_H_
#define MDD_AUTODIFF_H_

#include <deque>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mdd/matrix.h"

namespace mdd::nn {

class Tape;

// Handle into a Tape node. Cheap to copy; valid for the tape's lifetime.
struct Var {
  Tape* tape = nullptr;
  int id = -1;
};

// Reverse-mode tape over Matrix values. Every network forward pass in this
// project runs through a tape, so the gradient checks exercise the same code
// path that inference uses. A tape is built per forward call and is not
// shared across threads; independent tapes may run concurrently.
class Tape {
 public:
  // Leaf tracked by address: repeated leaf(m) on one tape returns the same
  // node, so gradients accumulate across all uses of a parameter.
  Var leaf(const Matrix& m);
  // Anonymous leaf (inputs, positional encodings, additive masks).
  Var constant(Matrix m);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var scale(Var a, double k);
  Var affine(Var a, double k, double c);  // k*x + c
  Var add_rowvec(Var a, Var row);         // row is 1xC, broadcast over rows
  Var mul_rowvec(Var a, Var row);
  Var broadcast_row(Var row, int n);      // 1xC -> NxC
  Var concat_cols(Var a, Var b);
  Var concat_rows(const std::vector<Var>& parts);
  Var slice_rows(Var a, int r0, int r1);  // rows [r0, r1)
  Var gather_rows(Var table, std::vector<int> ids);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var relu(Var a);
  Var softmax_rows(Var a);
  Var log_softmax_rows(Var a);
  // Row-wise (x - mean) / sqrt(var + eps); affine rescale is applied by the
  // caller with mul_rowvec/add_rowvec.
  Var layer_norm_rows(Var a, double eps = 1e-12);
  Var reduce_sum(Var a);  // 1x1
  // Mean over the selected rows of -log_probs(row, target[row_pos]).
  Var nll_rows(Var log_probs, std::vector<int> targets, std::vector<int> rows);

  const Matrix& value(Var v) const;
  double scalar(Var v) const;

  // Backpropagates from a 1x1 node. May be called once per tape.
  void backward(Var loss);
  // Gradient of a leaf created via leaf(m); nullptr when m never entered
  // the graph. Valid after backward().
  const Matrix* grad_of(const Matrix& m) const;

 private:
  enum class Op {
    kLeaf, kAdd, kSub, kMul, kMatmul, kTranspose, kScale, kAffine,
    kAddRow, kMulRow, kBroadcastRow, kConcatCols, kConcatRows, kSliceRows,
    kGather, kSigmoid, kTanh, kRelu, kSoftmaxRows, kLogSoftmaxRows,
    kLayerNorm, kReduceSum, kNllRows,
  };
  struct Node {
    Matrix value;
    Matrix grad;
    Op op = Op::kLeaf;
    int a = -1, b = -1;
    double k = 0.0, c = 0.0;
    std::vector<int> ints;   // gather ids / nll targets / concat parents
    std::vector<int> ints2;  // nll row subset
  };

  Var push(Node node);
  Matrix& grad(int id);
  void accumulate(int id, const Matrix& g);

  // Deque keeps value/grad references stable while ops are appended.
  std::deque<Node> nodes_;
  std::unordered_map<const Matrix*, int> leaf_ids_;
  bool backward_done_ = false;
};

// Named reference to a parameter matrix owned by a weights struct.
struct ParamRef {
  std::string name;
  Matrix* value = nullptr;
};

// Builds a scalar loss on the given tape.
using LossFn = std::function<Var(Tape&)>;

// Central-difference gradient verification: returns
// max over parameter elements of |analytic - numeric| / max(1, |analytic|, |numeric|).
double gradcheck(const LossFn& loss_fn, const std::vector<ParamRef>& params,
                 double eps = 1e-5);

}  // namespace mdd::nn

#endif  // MDD_AUTODIFF_H_
