// include/mdd/layers.h

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

#ifndef MDD_LAYERS_H_
#define MDD_LAYERS_H_

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mdd/autodiff.h"
#include "mdd/matrix.h"
#include "mdd/rng.h"

namespace mdd::nn {

using ParamVisitor = std::function<void(const std::string& name, Matrix& m)>;

// Fills m with uniform values in [-bound, bound].
void fill_uniform(Matrix& m, Rng& rng, double bound);
// Uniform in +-1/sqrt(fan_in).
void init_linear(Matrix& m, Rng& rng, int fan_in);

// Sinusoidal absolute positional encodings, len x dim.
Matrix sinusoidal_positions(int len, int dim);

struct LinearLayer {
  Matrix W;  // in x out
  Matrix b;  // 1 x out
  LinearLayer() = default;
  LinearLayer(int in, int out) : W(in, out), b(1, out) {}
  void init(Rng& rng) { init_linear(W, rng, W.rows()); }
  Var forward(Tape& t, Var x) const {
    return t.add_rowvec(t.matmul(x, t.leaf(W)), t.leaf(b));
  }
  void visit(const std::string& prefix, const ParamVisitor& v) {
    v(prefix + ".W", W);
    v(prefix + ".b", b);
  }
};

struct LayerNorm {
  Matrix gamma;  // 1 x d
  Matrix beta;   // 1 x d
  LayerNorm() = default;
  explicit LayerNorm(int d) : gamma(1, d, 1.0), beta(1, d, 0.0) {}
  Var forward(Tape& t, Var x) const {
    return t.add_rowvec(t.mul_rowvec(t.layer_norm_rows(x), t.leaf(gamma)),
                        t.leaf(beta));
  }
  void visit(const std::string& prefix, const ParamVisitor& v) {
    v(prefix + ".g", gamma);
    v(prefix + ".b", beta);
  }
};

// softmax(q k^T / sqrt(d_head)) v for one head.
Var scaled_dot_attention(Tape& t, Var q, Var k, Var v);

struct AttentionHead {
  Matrix Wq, Wk, Wv;  // d_model x d_head
  Matrix Wo;          // d_head x d_model
};

struct MultiHeadAttention {
  std::vector<AttentionHead> heads;
  Matrix b_o;  // 1 x d_model
  MultiHeadAttention() = default;
  MultiHeadAttention(int d_model, int n_heads);
  void init(Rng& rng);
  // memory == x gives self-attention.
  Var forward(Tape& t, Var x, Var memory) const;
  void visit(const std::string& prefix, const ParamVisitor& v);
};

struct FeedForward {
  LinearLayer fc1, fc2;
  FeedForward() = default;
  FeedForward(int d_in, int d_hidden, int d_out)
      : fc1(d_in, d_hidden), fc2(d_hidden, d_out) {}
  void init(Rng& rng) {
    fc1.init(rng);
    fc2.init(rng);
  }
  Var forward(Tape& t, Var x) const {
    return fc2.forward(t, t.relu(fc1.forward(t, x)));
  }
  void visit(const std::string& prefix, const ParamVisitor& v) {
    fc1.visit(prefix + ".fc1", v);
    fc2.visit(prefix + ".fc2", v);
  }
};

// Post-norm transformer block: x = LN(x + attn); optionally a second
// cross-attention sublayer over an encoder memory; x = LN(x + ffn).
struct TransformerBlock {
  MultiHeadAttention self_attn;
  LayerNorm ln_self;
  bool has_cross = false;
  MultiHeadAttention cross_attn;
  LayerNorm ln_cross;
  FeedForward ffn;
  LayerNorm ln_ffn;

  TransformerBlock() = default;
  TransformerBlock(int d_model, int n_heads, int d_ff, bool with_cross);
  void init(Rng& rng);
  Var forward(Tape& t, Var x, const Var* memory) const;
  void visit(const std::string& prefix, const ParamVisitor& v);
};

// Gate convention: z = sig(Wz x + Uz h + bz), r = sig(Wr x + Ur h + br),
// hh = tanh(Wh x + Uh (r*h) + bh), h' = (1-z)*h + z*hh.
struct GruLayer {
  Matrix Wz, Wr, Wh;  // d_in x d_h
  Matrix Uz, Ur, Uh;  // d_h x d_h
  Matrix bz, br, bh;  // 1 x d_h
  GruLayer() = default;
  GruLayer(int d_in, int d_h);
  void init(Rng& rng);
  // seq is L x d_in, h0 zeros; returns (states L x d_h, final 1 x d_h).
  std::pair<Var, Var> forward(Tape& t, Var seq) const;
  void visit(const std::string& prefix, const ParamVisitor& v);
};

}  // namespace mdd::nn

#endif  // MDD_LAYERS_H_
