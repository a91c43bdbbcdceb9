// src/maskctc.cc

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

#include "mdd/maskctc.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace mdd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Additive mask suppressing the given columns in a logits matrix.
Matrix column_ban(int rows, int cols, std::initializer_list<int> banned) {
  Matrix m(rows, cols);
  for (int c : banned)
    for (int r = 0; r < rows; ++r) m(r, c) = kNegInf;
  return m;
}

}  // namespace

EncoderStack EncoderStack::create(const EncoderConfig& cfg, Rng& rng) {
  require(cfg.vocab >= 3, "encoder vocabulary must cover blank, mask and phones");
  EncoderStack enc;
  enc.cfg = cfg;
  enc.in_proj = nn::LinearLayer(cfg.d_feat, cfg.d_model);
  enc.in_proj.init(rng);
  for (int i = 0; i < cfg.n_blocks; ++i) {
    enc.blocks.emplace_back(cfg.d_model, cfg.n_heads, cfg.d_ff, false);
    enc.blocks.back().init(rng);
  }
  enc.head = nn::LinearLayer(cfg.d_model, cfg.vocab);
  enc.head.init(rng);
  return enc;
}

EncoderStack::Encoded EncoderStack::encode(const Matrix& features) const {
  require(features.rows() >= 1, "encode: empty feature matrix");
  require(features.cols() == cfg.d_feat,
          str_cat("encode: feature dim ", features.cols(), " != ", cfg.d_feat));
  require(features.all_finite(), "encode: non-finite features");

  nn::Tape t;
  nn::Var x = in_proj.forward(t, t.leaf(features));
  x = t.add(x, t.constant(nn::sinusoidal_positions(features.rows(), cfg.d_model)));
  for (const nn::TransformerBlock& b : blocks) x = b.forward(t, x, nullptr);
  nn::Var logits = head.forward(t, x);
  logits = t.add(logits, t.constant(column_ban(features.rows(), cfg.vocab,
                                               {kMaskToken})));
  nn::Var grid = t.softmax_rows(logits);
  return Encoded{t.value(x), PosteriorGrid{t.value(grid)}};
}

void EncoderStack::visit_params(const std::string& prefix,
                                const nn::ParamVisitor& v) {
  in_proj.visit(prefix + ".in_proj", v);
  for (size_t i = 0; i < blocks.size(); ++i)
    blocks[i].visit(prefix + ".block" + std::to_string(i), v);
  head.visit(prefix + ".head", v);
}

Cmlm Cmlm::create(const CmlmConfig& cfg, Rng& rng) {
  require(cfg.vocab >= 3, "CMLM vocabulary must cover blank, mask and phones");
  Cmlm m;
  m.cfg = cfg;
  m.embed = Matrix(cfg.vocab, cfg.d_model);
  nn::init_linear(m.embed, rng, cfg.d_model);
  for (int i = 0; i < cfg.n_blocks; ++i) {
    m.blocks.emplace_back(cfg.d_model, cfg.n_heads, cfg.d_ff, true);
    m.blocks.back().init(rng);
  }
  m.out_proj = nn::LinearLayer(cfg.d_model, cfg.vocab);
  m.out_proj.init(rng);
  return m;
}

nn::Var Cmlm::forward_logits(nn::Tape& t, const std::vector<int>& tokens,
                             nn::Var memory) const {
  require(!tokens.empty(), "CMLM forward on empty token sequence");
  for (int tok : tokens)
    require(tok != kCtcBlank && 0 < tok && tok < cfg.vocab,
            "CMLM tokens must be mask or phone ids");
  require(t.value(memory).cols() == cfg.d_model, "memory dim mismatch");

  int S = static_cast<int>(tokens.size());
  nn::Var x = t.gather_rows(t.leaf(embed), tokens);
  x = t.add(x, t.constant(nn::sinusoidal_positions(S, cfg.d_model)));
  for (const nn::TransformerBlock& b : blocks) x = b.forward(t, x, &memory);
  nn::Var logits = out_proj.forward(t, x);
  return t.add(logits, t.constant(column_ban(S, cfg.vocab,
                                             {kCtcBlank, kMaskToken})));
}

Matrix Cmlm::forward_probs(const std::vector<int>& tokens,
                           const Matrix& memory) const {
  nn::Tape t;
  nn::Var probs = t.softmax_rows(forward_logits(t, tokens, t.leaf(memory)));
  return t.value(probs);
}

void Cmlm::visit_params(const std::string& prefix, const nn::ParamVisitor& v) {
  v(prefix + ".embed", embed);
  for (size_t i = 0; i < blocks.size(); ++i)
    blocks[i].visit(prefix + ".block" + std::to_string(i), v);
  out_proj.visit(prefix + ".out", v);
}

void MaskCtcConfig::validate() const {
  require(p_thr >= 0.0 && p_thr <= 1.0, "p_thr must lie in [0,1]");
  require(iters >= 1, "refinement iteration count must be >= 1");
}

std::vector<int> initial_mask(const std::vector<int>& tokens,
                              const std::vector<double>& confidences,
                              double p_thr,
                              std::vector<int>* masked_positions) {
  require(tokens.size() == confidences.size(),
          "tokens/confidences length mismatch");
  std::vector<int> out = tokens;
  if (masked_positions) masked_positions->clear();
  for (size_t i = 0; i < out.size(); ++i) {
    if (confidences[i] < p_thr) {
      out[i] = kMaskToken;
      if (masked_positions) masked_positions->push_back(static_cast<int>(i));
    }
  }
  return out;
}

RefineResult mask_predict_refine(std::vector<int> tokens, const Matrix& memory,
                                 const Cmlm& cmlm, int iters) {
  require(iters >= 1, "refinement iteration count must be >= 1");
  RefineResult res;
  res.fill_prob.assign(tokens.size(), -1.0);

  std::vector<int> masked;
  for (size_t i = 0; i < tokens.size(); ++i)
    if (tokens[i] == kMaskToken) masked.push_back(static_cast<int>(i));
  int initial_masked = static_cast<int>(masked.size());
  if (initial_masked == 0) {
    res.tokens = std::move(tokens);
    return res;
  }

  int per_iter = (initial_masked + iters - 1) / iters;  // ceil(M/K)
  while (!masked.empty()) {
    RefineStep step;
    step.masked_positions = masked;

    Matrix probs = cmlm.forward_probs(tokens, memory);

    // Top prediction for every still-masked position.
    struct Candidate {
      int position;
      int token;
      double prob;
    };
    std::vector<Candidate> cands;
    cands.reserve(masked.size());
    for (int pos : masked) {
      int best = -1;
      double best_p = -1.0;
      for (int v = 0; v < probs.cols(); ++v) {
        if (probs(pos, v) > best_p) {
          best_p = probs(pos, v);
          best = v;
        }
      }
      cands.push_back(Candidate{pos, best, best_p});
    }
    // Highest probability first; leftmost position on ties. Stable order by
    // construction: positions ascend in `cands`.
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& a, const Candidate& b) {
                       return a.prob > b.prob;
                     });

    int commit = std::min<int>(per_iter, static_cast<int>(cands.size()));
    for (int k = 0; k < commit; ++k) {
      const Candidate& c = cands[k];
      tokens[c.position] = c.token;
      res.fill_prob[c.position] = c.prob;
      step.filled_positions.push_back(c.position);
    }
    std::sort(step.filled_positions.begin(), step.filled_positions.end());

    std::vector<int> remaining;
    for (int pos : masked)
      if (tokens[pos] == kMaskToken) remaining.push_back(pos);
    masked = std::move(remaining);
    res.trace.push_back(std::move(step));
  }

  res.tokens = std::move(tokens);
  return res;
}

namespace {

DictationResult dictate_impl(const PosteriorGrid& grid, const Matrix& memory,
                             const Cmlm& cmlm, const MaskCtcConfig& cfg) {
  cfg.validate();
  DictationResult result;

  std::vector<int> path = greedy_path(grid);
  std::vector<TokenSpan> spans = collapse(path);
  std::vector<double> conf = token_confidence(grid, spans, cfg.conf_mode);
  std::vector<int> tokens;
  tokens.reserve(spans.size());
  for (const TokenSpan& s : spans) tokens.push_back(s.token);

  if (tokens.empty()) return result;

  std::vector<int> masked_positions;
  std::vector<int> masked =
      initial_mask(tokens, conf, cfg.p_thr, &masked_positions);

  if (masked_positions.empty()) {
    result.tokens = std::move(tokens);
    result.confidences = std::move(conf);
    return result;
  }

  RefineResult refined = mask_predict_refine(std::move(masked), memory, cmlm,
                                             cfg.iters);
  result.tokens = std::move(refined.tokens);
  result.trace = std::move(refined.trace);
  result.confidences = std::move(conf);
  // Refined positions carry their CMLM fill probability; untouched positions
  // keep the CTC confidence.
  for (int pos : masked_positions)
    result.confidences[pos] = refined.fill_prob[pos];
  return result;
}

}  // namespace

DictationResult dictate(const Matrix& features, const EncoderStack& enc,
                        const Cmlm& cmlm, const MaskCtcConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  EncoderStack::Encoded encoded = enc.encode(features);
  DictationResult result = dictate_impl(encoded.grid, encoded.memory, cmlm, cfg);
  result.decode_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

DictationResult dictate_from_grid(const PosteriorGrid& grid, const Matrix& memory,
                                  const Cmlm& cmlm, const MaskCtcConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  DictationResult result = dictate_impl(grid, memory, cmlm, cfg);
  result.decode_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

nn::Var cmlm_masked_crossentropy(nn::Tape& t, const Cmlm& cmlm,
                                 const std::vector<int>& masked_tokens,
                                 nn::Var memory,
                                 const std::vector<int>& reference) {
  require(reference.size() == masked_tokens.size(),
          "reference must align one-to-one with the masked sequence");
  std::vector<int> rows, targets;
  for (size_t i = 0; i < masked_tokens.size(); ++i) {
    if (masked_tokens[i] == kMaskToken) {
      rows.push_back(static_cast<int>(i));
      targets.push_back(reference[i]);
    }
  }
  require(!rows.empty(), "masked cross-entropy needs at least one masked position");
  nn::Var lp = t.log_softmax_rows(cmlm.forward_logits(t, masked_tokens, memory));
  return t.nll_rows(lp, targets, rows);
}

double cmlm_masked_crossentropy(const Cmlm& cmlm,
                                const std::vector<int>& masked_tokens,
                                const Matrix& memory,
                                const std::vector<int>& reference) {
  nn::Tape t;
  return t.scalar(
      cmlm_masked_crossentropy(t, cmlm, masked_tokens, t.leaf(memory), reference));
}

}  // namespace mdd
