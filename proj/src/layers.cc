// src/layers.cc

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

#include "mdd/layers.h"

#include <cmath>

namespace mdd::nn {

void fill_uniform(Matrix& m, Rng& rng, double bound) {
  for (int64_t i = 0; i < m.size(); ++i)
    m.data()[i] = rng.uniform(-bound, bound);
}

void init_linear(Matrix& m, Rng& rng, int fan_in) {
  fill_uniform(m, rng, 1.0 / std::sqrt(static_cast<double>(fan_in)));
}

Matrix sinusoidal_positions(int len, int dim) {
  Matrix pe(len, dim);
  for (int pos = 0; pos < len; ++pos) {
    for (int j = 0; j < dim; ++j) {
      int pair = j / 2;
      double angle = pos / std::pow(10000.0, 2.0 * pair / dim);
      pe(pos, j) = (j % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return pe;
}

Var scaled_dot_attention(Tape& t, Var q, Var k, Var v) {
  int d_head = t.value(q).cols();
  Var scores = t.scale(t.matmul(q, t.transpose(k)), 1.0 / std::sqrt(d_head));
  return t.matmul(t.softmax_rows(scores), v);
}

MultiHeadAttention::MultiHeadAttention(int d_model, int n_heads) {
  require(n_heads > 0 && d_model % n_heads == 0,
          "model dim must be divisible by head count");
  int d_head = d_model / n_heads;
  heads.resize(n_heads);
  for (AttentionHead& h : heads) {
    h.Wq = Matrix(d_model, d_head);
    h.Wk = Matrix(d_model, d_head);
    h.Wv = Matrix(d_model, d_head);
    h.Wo = Matrix(d_head, d_model);
  }
  b_o = Matrix(1, d_model);
}

void MultiHeadAttention::init(Rng& rng) {
  for (AttentionHead& h : heads) {
    init_linear(h.Wq, rng, h.Wq.rows());
    init_linear(h.Wk, rng, h.Wk.rows());
    init_linear(h.Wv, rng, h.Wv.rows());
    init_linear(h.Wo, rng, h.Wo.rows());
  }
}

Var MultiHeadAttention::forward(Tape& t, Var x, Var memory) const {
  Var out{};
  bool first = true;
  for (const AttentionHead& h : heads) {
    Var q = t.matmul(x, t.leaf(h.Wq));
    Var k = t.matmul(memory, t.leaf(h.Wk));
    Var v = t.matmul(memory, t.leaf(h.Wv));
    Var head = t.matmul(scaled_dot_attention(t, q, k, v), t.leaf(h.Wo));
    out = first ? head : t.add(out, head);
    first = false;
  }
  return t.add_rowvec(out, t.leaf(b_o));
}

void MultiHeadAttention::visit(const std::string& prefix, const ParamVisitor& v) {
  for (size_t i = 0; i < heads.size(); ++i) {
    std::string hp = prefix + ".h" + std::to_string(i);
    v(hp + ".Wq", heads[i].Wq);
    v(hp + ".Wk", heads[i].Wk);
    v(hp + ".Wv", heads[i].Wv);
    v(hp + ".Wo", heads[i].Wo);
  }
  v(prefix + ".bo", b_o);
}

TransformerBlock::TransformerBlock(int d_model, int n_heads, int d_ff,
                                   bool with_cross)
    : self_attn(d_model, n_heads),
      ln_self(d_model),
      has_cross(with_cross),
      ffn(d_model, d_ff, d_model),
      ln_ffn(d_model) {
  if (with_cross) {
    cross_attn = MultiHeadAttention(d_model, n_heads);
    ln_cross = LayerNorm(d_model);
  }
}

void TransformerBlock::init(Rng& rng) {
  self_attn.init(rng);
  if (has_cross) cross_attn.init(rng);
  ffn.init(rng);
}

Var TransformerBlock::forward(Tape& t, Var x, const Var* memory) const {
  x = ln_self.forward(t, t.add(x, self_attn.forward(t, x, x)));
  if (has_cross) {
    require(memory != nullptr, "cross-attention block needs a memory input");
    x = ln_cross.forward(t, t.add(x, cross_attn.forward(t, x, *memory)));
  }
  x = ln_ffn.forward(t, t.add(x, ffn.forward(t, x)));
  return x;
}

void TransformerBlock::visit(const std::string& prefix, const ParamVisitor& v) {
  self_attn.visit(prefix + ".self", v);
  ln_self.visit(prefix + ".ln1", v);
  if (has_cross) {
    cross_attn.visit(prefix + ".cross", v);
    ln_cross.visit(prefix + ".lnc", v);
  }
  ffn.visit(prefix + ".ffn", v);
  ln_ffn.visit(prefix + ".ln2", v);
}

GruLayer::GruLayer(int d_in, int d_h)
    : Wz(d_in, d_h), Wr(d_in, d_h), Wh(d_in, d_h),
      Uz(d_h, d_h), Ur(d_h, d_h), Uh(d_h, d_h),
      bz(1, d_h), br(1, d_h), bh(1, d_h) {}

void GruLayer::init(Rng& rng) {
  init_linear(Wz, rng, Wz.rows());
  init_linear(Wr, rng, Wr.rows());
  init_linear(Wh, rng, Wh.rows());
  init_linear(Uz, rng, Uz.rows());
  init_linear(Ur, rng, Ur.rows());
  init_linear(Uh, rng, Uh.rows());
}

std::pair<Var, Var> GruLayer::forward(Tape& t, Var seq) const {
  const Matrix& vs = t.value(seq);
  require(vs.rows() >= 1, "GRU input must be a non-empty sequence");
  require(vs.cols() == Wz.rows(), "GRU input dim mismatch");
  int d_h = Wz.cols();

  Var wz = t.leaf(Wz), wr = t.leaf(Wr), wh = t.leaf(Wh);
  Var uz = t.leaf(Uz), ur = t.leaf(Ur), uh = t.leaf(Uh);
  Var vbz = t.leaf(bz), vbr = t.leaf(br), vbh = t.leaf(bh);

  Var h = t.constant(Matrix(1, d_h));
  std::vector<Var> states;
  states.reserve(vs.rows());
  for (int i = 0; i < vs.rows(); ++i) {
    Var x = t.slice_rows(seq, i, i + 1);
    Var z = t.sigmoid(t.add_rowvec(t.add(t.matmul(x, wz), t.matmul(h, uz)), vbz));
    Var r = t.sigmoid(t.add_rowvec(t.add(t.matmul(x, wr), t.matmul(h, ur)), vbr));
    Var hh = t.tanh(t.add_rowvec(t.add(t.matmul(x, wh), t.matmul(t.mul(r, h), uh)), vbh));
    // (1-z)*h + z*hh
    h = t.add(t.mul(t.affine(z, -1.0, 1.0), h), t.mul(z, hh));
    states.push_back(h);
  }
  return {t.concat_rows(states), h};
}

void GruLayer::visit(const std::string& prefix, const ParamVisitor& v) {
  v(prefix + ".Wz", Wz);
  v(prefix + ".Wr", Wr);
  v(prefix + ".Wh", Wh);
  v(prefix + ".Uz", Uz);
  v(prefix + ".Ur", Ur);
  v(prefix + ".Uh", Uh);
  v(prefix + ".bz", bz);
  v(prefix + ".br", br);
  v(prefix + ".bh", bh);
}

}  // namespace mdd::nn
