// src/autodiff.cc

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

#include "mdd/autodiff.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mdd::nn {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::leaf(const Matrix& m) {
  auto it = leaf_ids_.find(&m);
  if (it != leaf_ids_.end()) return Var{this, it->second};
  Node n;
  n.value = m;
  Var v = push(std::move(n));
  leaf_ids_.emplace(&m, v.id);
  return v;
}

Var Tape::constant(Matrix m) {
  Node n;
  n.value = std::move(m);
  return push(std::move(n));
}

const Matrix& Tape::value(Var v) const { return nodes_[v.id].value; }

double Tape::scalar(Var v) const {
  const Matrix& m = nodes_[v.id].value;
  require(m.rows() == 1 && m.cols() == 1, "scalar() on non-1x1 value");
  return m(0, 0);
}

Matrix& Tape::grad(int id) {
  Node& n = nodes_[id];
  if (n.grad.empty() && !n.value.empty())
    n.grad = Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::accumulate(int id, const Matrix& g) {
  Matrix& dst = grad(id);
  for (int64_t i = 0; i < dst.size(); ++i) dst.data()[i] += g.data()[i];
}

Var Tape::add(Var a, Var b) {
  Node n;
  n.value = mdd::add(value(a), value(b));
  n.op = Op::kAdd;
  n.a = a.id;
  n.b = b.id;
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  Node n;
  n.value = mdd::sub(value(a), value(b));
  n.op = Op::kSub;
  n.a = a.id;
  n.b = b.id;
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  Node n;
  n.value = hadamard(value(a), value(b));
  n.op = Op::kMul;
  n.a = a.id;
  n.b = b.id;
  return push(std::move(n));
}

Var Tape::matmul(Var a, Var b) {
  Node n;
  n.value = mdd::matmul(value(a), value(b));
  n.op = Op::kMatmul;
  n.a = a.id;
  n.b = b.id;
  return push(std::move(n));
}

Var Tape::transpose(Var a) {
  Node n;
  n.value = mdd::transpose(value(a));
  n.op = Op::kTranspose;
  n.a = a.id;
  return push(std::move(n));
}

Var Tape::scale(Var a, double k) { return affine(a, k, 0.0); }

Var Tape::affine(Var a, double k, double c) {
  Node n;
  n.value = value(a);
  for (int64_t i = 0; i < n.value.size(); ++i)
    n.value.data()[i] = k * n.value.data()[i] + c;
  n.op = Op::kAffine;
  n.a = a.id;
  n.k = k;
  n.c = c;
  return push(std::move(n));
}

Var Tape::add_rowvec(Var a, Var row) {
  const Matrix& va = value(a);
  const Matrix& vr = value(row);
  require(vr.rows() == 1 && vr.cols() == va.cols(), "add_rowvec shape mismatch");
  Node n;
  n.value = va;
  for (int i = 0; i < va.rows(); ++i)
    for (int j = 0; j < va.cols(); ++j) n.value(i, j) += vr(0, j);
  n.op = Op::kAddRow;
  n.a = a.id;
  n.b = row.id;
  return push(std::move(n));
}

Var Tape::mul_rowvec(Var a, Var row) {
  const Matrix& va = value(a);
  const Matrix& vr = value(row);
  require(vr.rows() == 1 && vr.cols() == va.cols(), "mul_rowvec shape mismatch");
  Node n;
  n.value = va;
  for (int i = 0; i < va.rows(); ++i)
    for (int j = 0; j < va.cols(); ++j) n.value(i, j) *= vr(0, j);
  n.op = Op::kMulRow;
  n.a = a.id;
  n.b = row.id;
  return push(std::move(n));
}

Var Tape::broadcast_row(Var row, int nrows) {
  const Matrix& vr = value(row);
  require(vr.rows() == 1, "broadcast_row expects a 1xC row");
  Node n;
  n.value = Matrix(nrows, vr.cols());
  for (int i = 0; i < nrows; ++i)
    for (int j = 0; j < vr.cols(); ++j) n.value(i, j) = vr(0, j);
  n.op = Op::kBroadcastRow;
  n.a = row.id;
  return push(std::move(n));
}

Var Tape::concat_cols(Var a, Var b) {
  const Matrix& va = value(a);
  const Matrix& vb = value(b);
  require(va.rows() == vb.rows(), "concat_cols row mismatch");
  Node n;
  n.value = Matrix(va.rows(), va.cols() + vb.cols());
  for (int i = 0; i < va.rows(); ++i) {
    for (int j = 0; j < va.cols(); ++j) n.value(i, j) = va(i, j);
    for (int j = 0; j < vb.cols(); ++j) n.value(i, va.cols() + j) = vb(i, j);
  }
  n.op = Op::kConcatCols;
  n.a = a.id;
  n.b = b.id;
  return push(std::move(n));
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_rows with no parts");
  int cols = value(parts[0]).cols();
  int rows = 0;
  for (Var p : parts) {
    require(value(p).cols() == cols, "concat_rows col mismatch");
    rows += value(p).rows();
  }
  Node n;
  n.value = Matrix(rows, cols);
  int r = 0;
  for (Var p : parts) {
    const Matrix& vp = value(p);
    for (int i = 0; i < vp.rows(); ++i, ++r)
      for (int j = 0; j < cols; ++j) n.value(r, j) = vp(i, j);
    n.ints.push_back(p.id);
  }
  n.op = Op::kConcatRows;
  return push(std::move(n));
}

Var Tape::slice_rows(Var a, int r0, int r1) {
  const Matrix& va = value(a);
  require(0 <= r0 && r0 <= r1 && r1 <= va.rows(), "slice_rows out of range");
  Node n;
  n.value = Matrix(r1 - r0, va.cols());
  for (int i = r0; i < r1; ++i)
    for (int j = 0; j < va.cols(); ++j) n.value(i - r0, j) = va(i, j);
  n.op = Op::kSliceRows;
  n.a = a.id;
  n.k = r0;
  return push(std::move(n));
}

Var Tape::gather_rows(Var table, std::vector<int> ids) {
  const Matrix& vt = value(table);
  Node n;
  n.value = Matrix(static_cast<int>(ids.size()), vt.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    require(0 <= ids[i] && ids[i] < vt.rows(), "gather_rows id out of range");
    for (int j = 0; j < vt.cols(); ++j)
      n.value(static_cast<int>(i), j) = vt(ids[i], j);
  }
  n.op = Op::kGather;
  n.a = table.id;
  n.ints = std::move(ids);
  return push(std::move(n));
}

Var Tape::sigmoid(Var a) {
  Node n;
  n.value = mdd::sigmoid(value(a));
  n.op = Op::kSigmoid;
  n.a = a.id;
  return push(std::move(n));
}

Var Tape::tanh(Var a) {
  Node n;
  n.value = mdd::tanh(value(a));
  n.op = Op::kTanh;
  n.a = a.id;
  return push(std::move(n));
}

Var Tape::relu(Var a) {
  Node n;
  n.value = mdd::relu(value(a));
  n.op = Op::kRelu;
  n.a = a.id;
  return push(std::move(n));
}

Var Tape::softmax_rows(Var a) {
  Node n;
  n.value = mdd::softmax_rows(value(a));
  n.op = Op::kSoftmaxRows;
  n.a = a.id;
  return push(std::move(n));
}

Var Tape::log_softmax_rows(Var a) {
  Node n;
  n.value = mdd::log_softmax_rows(value(a));
  n.op = Op::kLogSoftmaxRows;
  n.a = a.id;
  return push(std::move(n));
}

Var Tape::layer_norm_rows(Var a, double eps) {
  const Matrix& va = value(a);
  Node n;
  n.value = Matrix(va.rows(), va.cols());
  for (int i = 0; i < va.rows(); ++i) {
    double mean = 0.0;
    for (int j = 0; j < va.cols(); ++j) mean += va(i, j);
    mean /= va.cols();
    double var = 0.0;
    for (int j = 0; j < va.cols(); ++j) {
      double d = va(i, j) - mean;
      var += d * d;
    }
    var /= va.cols();
    double inv = 1.0 / std::sqrt(var + eps);
    for (int j = 0; j < va.cols(); ++j) n.value(i, j) = (va(i, j) - mean) * inv;
  }
  n.op = Op::kLayerNorm;
  n.a = a.id;
  n.k = eps;
  return push(std::move(n));
}

Var Tape::reduce_sum(Var a) {
  const Matrix& va = value(a);
  double s = 0.0;
  for (int64_t i = 0; i < va.size(); ++i) s += va.data()[i];
  Node n;
  n.value = Matrix(1, 1, s);
  n.op = Op::kReduceSum;
  n.a = a.id;
  return push(std::move(n));
}

Var Tape::nll_rows(Var log_probs, std::vector<int> targets, std::vector<int> rows) {
  const Matrix& lp = value(log_probs);
  require(!rows.empty(), "nll_rows with empty row subset");
  require(targets.size() == rows.size(), "nll_rows targets/rows length mismatch");
  double s = 0.0;
  for (size_t k = 0; k < rows.size(); ++k) {
    require(0 <= rows[k] && rows[k] < lp.rows(), "nll_rows row out of range");
    require(0 <= targets[k] && targets[k] < lp.cols(), "nll_rows target out of range");
    s -= lp(rows[k], targets[k]);
  }
  Node n;
  n.value = Matrix(1, 1, s / static_cast<double>(rows.size()));
  n.op = Op::kNllRows;
  n.a = log_probs.id;
  n.ints = std::move(targets);
  n.ints2 = std::move(rows);
  return push(std::move(n));
}

void Tape::backward(Var loss) {
  require(!backward_done_, "backward() called twice on one tape");
  backward_done_ = true;
  const Matrix& lv = value(loss);
  require(lv.rows() == 1 && lv.cols() == 1, "backward() requires a 1x1 loss");
  grad(loss.id)(0, 0) = 1.0;

  for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.grad.empty()) continue;  // no downstream use
    const Matrix& g = n.grad;
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kAdd:
        accumulate(n.a, g);
        accumulate(n.b, g);
        break;
      case Op::kSub:
        accumulate(n.a, g);
        accumulate(n.b, mdd::scale(g, -1.0));
        break;
      case Op::kMul: {
        accumulate(n.a, hadamard(g, nodes_[n.b].value));
        accumulate(n.b, hadamard(g, nodes_[n.a].value));
        break;
      }
      case Op::kMatmul: {
        accumulate(n.a, mdd::matmul(g, mdd::transpose(nodes_[n.b].value)));
        accumulate(n.b, mdd::matmul(mdd::transpose(nodes_[n.a].value), g));
        break;
      }
      case Op::kTranspose:
        accumulate(n.a, mdd::transpose(g));
        break;
      case Op::kAffine:
        accumulate(n.a, mdd::scale(g, n.k));
        break;
      case Op::kAddRow:
        accumulate(n.a, g);
        accumulate(n.b, colsum(g));
        break;
      case Op::kMulRow: {
        const Matrix& row = nodes_[n.b].value;
        Matrix da(g.rows(), g.cols());
        Matrix drow(1, g.cols());
        const Matrix& va = nodes_[n.a].value;
        for (int i = 0; i < g.rows(); ++i)
          for (int j = 0; j < g.cols(); ++j) {
            da(i, j) = g(i, j) * row(0, j);
            drow(0, j) += g(i, j) * va(i, j);
          }
        accumulate(n.a, da);
        accumulate(n.b, drow);
        break;
      }
      case Op::kBroadcastRow:
        accumulate(n.a, colsum(g));
        break;
      case Op::kConcatCols: {
        const Matrix& va = nodes_[n.a].value;
        const Matrix& vb = nodes_[n.b].value;
        Matrix da(va.rows(), va.cols());
        Matrix db(vb.rows(), vb.cols());
        for (int i = 0; i < g.rows(); ++i) {
          for (int j = 0; j < va.cols(); ++j) da(i, j) = g(i, j);
          for (int j = 0; j < vb.cols(); ++j) db(i, j) = g(i, va.cols() + j);
        }
        accumulate(n.a, da);
        accumulate(n.b, db);
        break;
      }
      case Op::kConcatRows: {
        int r = 0;
        for (int pid : n.ints) {
          const Matrix& vp = nodes_[pid].value;
          Matrix dp(vp.rows(), vp.cols());
          for (int i = 0; i < vp.rows(); ++i, ++r)
            for (int j = 0; j < g.cols(); ++j) dp(i, j) = g(r, j);
          accumulate(pid, dp);
        }
        break;
      }
      case Op::kSliceRows: {
        const Matrix& va = nodes_[n.a].value;
        Matrix da(va.rows(), va.cols());
        int r0 = static_cast<int>(n.k);
        for (int i = 0; i < g.rows(); ++i)
          for (int j = 0; j < g.cols(); ++j) da(r0 + i, j) = g(i, j);
        accumulate(n.a, da);
        break;
      }
      case Op::kGather: {
        const Matrix& vt = nodes_[n.a].value;
        Matrix dt(vt.rows(), vt.cols());
        for (size_t i = 0; i < n.ints.size(); ++i)
          for (int j = 0; j < g.cols(); ++j)
            dt(n.ints[i], j) += g(static_cast<int>(i), j);
        accumulate(n.a, dt);
        break;
      }
      case Op::kSigmoid: {
        Matrix da(g.rows(), g.cols());
        for (int64_t i = 0; i < g.size(); ++i) {
          double y = n.value.data()[i];
          da.data()[i] = g.data()[i] * y * (1.0 - y);
        }
        accumulate(n.a, da);
        break;
      }
      case Op::kTanh: {
        Matrix da(g.rows(), g.cols());
        for (int64_t i = 0; i < g.size(); ++i) {
          double y = n.value.data()[i];
          da.data()[i] = g.data()[i] * (1.0 - y * y);
        }
        accumulate(n.a, da);
        break;
      }
      case Op::kRelu: {
        const Matrix& va = nodes_[n.a].value;
        Matrix da(g.rows(), g.cols());
        for (int64_t i = 0; i < g.size(); ++i)
          da.data()[i] = va.data()[i] > 0 ? g.data()[i] : 0.0;
        accumulate(n.a, da);
        break;
      }
      case Op::kSoftmaxRows: {
        const Matrix& y = n.value;
        Matrix da(g.rows(), g.cols());
        for (int i = 0; i < g.rows(); ++i) {
          double dot = 0.0;
          for (int j = 0; j < g.cols(); ++j) dot += g(i, j) * y(i, j);
          for (int j = 0; j < g.cols(); ++j)
            da(i, j) = y(i, j) * (g(i, j) - dot);
        }
        accumulate(n.a, da);
        break;
      }
      case Op::kLogSoftmaxRows: {
        const Matrix& y = n.value;
        Matrix da(g.rows(), g.cols());
        for (int i = 0; i < g.rows(); ++i) {
          double gsum = 0.0;
          for (int j = 0; j < g.cols(); ++j) gsum += g(i, j);
          for (int j = 0; j < g.cols(); ++j) {
            double p = std::exp(y(i, j));  // softmax of the input row
            da(i, j) = g(i, j) - p * gsum;
          }
        }
        accumulate(n.a, da);
        break;
      }
      case Op::kLayerNorm: {
        const Matrix& va = nodes_[n.a].value;
        const Matrix& y = n.value;
        Matrix da(g.rows(), g.cols());
        int d = va.cols();
        for (int i = 0; i < g.rows(); ++i) {
          double mean = 0.0, var = 0.0;
          for (int j = 0; j < d; ++j) mean += va(i, j);
          mean /= d;
          for (int j = 0; j < d; ++j) {
            double diff = va(i, j) - mean;
            var += diff * diff;
          }
          var /= d;
          double inv = 1.0 / std::sqrt(var + n.k);
          double gmean = 0.0, gydot = 0.0;
          for (int j = 0; j < d; ++j) {
            gmean += g(i, j);
            gydot += g(i, j) * y(i, j);
          }
          gmean /= d;
          gydot /= d;
          for (int j = 0; j < d; ++j)
            da(i, j) = inv * (g(i, j) - gmean - y(i, j) * gydot);
        }
        accumulate(n.a, da);
        break;
      }
      case Op::kReduceSum: {
        const Matrix& va = nodes_[n.a].value;
        Matrix da(va.rows(), va.cols(), g(0, 0));
        accumulate(n.a, da);
        break;
      }
      case Op::kNllRows: {
        const Matrix& lp = nodes_[n.a].value;
        Matrix da(lp.rows(), lp.cols());
        double w = g(0, 0) / static_cast<double>(n.ints2.size());
        for (size_t k = 0; k < n.ints2.size(); ++k)
          da(n.ints2[k], n.ints[k]) -= w;
        accumulate(n.a, da);
        break;
      }
    }
  }
}

const Matrix* Tape::grad_of(const Matrix& m) const {
  auto it = leaf_ids_.find(&m);
  if (it == leaf_ids_.end()) return nullptr;
  const Node& n = nodes_[it->second];
  return n.grad.empty() ? nullptr : &n.grad;
}

double gradcheck(const LossFn& loss_fn, const std::vector<ParamRef>& params,
                 double eps) {
  Tape tape;
  Var loss = loss_fn(tape);
  tape.backward(loss);

  std::vector<Matrix> analytic;
  analytic.reserve(params.size());
  for (const ParamRef& p : params) {
    const Matrix* g = tape.grad_of(*p.value);
    analytic.push_back(g ? *g : Matrix(p.value->rows(), p.value->cols()));
  }

  double max_rel = 0.0;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    Matrix& m = *params[pi].value;
    for (int64_t i = 0; i < m.size(); ++i) {
      double orig = m.data()[i];
      m.data()[i] = orig + eps;
      Tape tp;
      double fp = tp.scalar(loss_fn(tp));
      m.data()[i] = orig - eps;
      Tape tm;
      double fm = tm.scalar(loss_fn(tm));
      m.data()[i] = orig;
      require(std::isfinite(fp) && std::isfinite(fm),
              str_cat("gradcheck: non-finite loss at perturbed ", params[pi].name));
      double numeric = (fp - fm) / (2.0 * eps);
      double ana = analytic[pi].data()[i];
      double denom = std::max({1.0, std::abs(ana), std::abs(numeric)});
      max_rel = std::max(max_rel, std::abs(ana - numeric) / denom);
    }
  }
  return max_rel;
}

}  // namespace mdd::nn
