// tests/test_maskctc.cc

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
#include <cmath>

#include "mdd/rng.h"
#include "test_util.h"

namespace mdd {

namespace {

EncoderStack tiny_encoder(int vocab, Rng& rng, int n_blocks = 1) {
  EncoderConfig cfg;
  cfg.d_feat = 6;
  cfg.d_model = 8;
  cfg.n_blocks = n_blocks;
  cfg.n_heads = 2;
  cfg.d_ff = 12;
  cfg.vocab = vocab;
  return EncoderStack::create(cfg, rng);
}

Cmlm tiny_cmlm(int vocab, Rng& rng) {
  CmlmConfig cfg;
  cfg.vocab = vocab;
  cfg.d_model = 8;
  cfg.n_blocks = 1;
  cfg.n_heads = 2;
  cfg.d_ff = 12;
  return Cmlm::create(cfg, rng);
}

Matrix random_features(int T, int d, Rng& rng) {
  Matrix m(T, d);
  nn::fill_uniform(m, rng, 1.0);
  return m;
}

// One frame per token followed by a blank separator frame; each token frame
// carries the requested confidence. Confidences must stay above 1/vocab so
// the token remains the frame argmax.
PosteriorGrid grid_with_confidences(const std::vector<int>& tokens,
                                    const std::vector<double>& confidences,
                                    int vocab) {
  int T = static_cast<int>(tokens.size()) * 2;
  Matrix m(T, vocab);
  for (size_t i = 0; i < tokens.size(); ++i) {
    int t = static_cast<int>(i) * 2;
    double c = confidences[i];
    double rest = (1.0 - c) / (vocab - 1);
    for (int v = 0; v < vocab; ++v) m(t, v) = v == tokens[i] ? c : rest;
    m(t + 1, kCtcBlank) = 0.9;
    double spread = 0.1 / (vocab - 1);
    for (int v = 1; v < vocab; ++v) m(t + 1, v) = spread;
  }
  return PosteriorGrid::validated(std::move(m));
}

}  // namespace

void test_encode_zero_blocks() {
  // With no attention blocks the memory is just the projected input plus the
  // positional encodings, and the grid is the softmax of the output head.
  Rng rng(3);
  EncoderStack enc = tiny_encoder(7, rng, /*n_blocks=*/0);
  Matrix feats = random_features(4, 6, rng);
  EncoderStack::Encoded out = enc.encode(feats);

  Matrix expect_mem = add(add(matmul(feats, enc.in_proj.W),
                              [&] {
                                Matrix b(4, 8);
                                for (int i = 0; i < 4; ++i)
                                  for (int j = 0; j < 8; ++j)
                                    b(i, j) = enc.in_proj.b(0, j);
                                return b;
                              }()),
                          nn::sinusoidal_positions(4, 8));
  CHECK(out.memory == expect_mem);

  Matrix logits = matmul(expect_mem, enc.head.W);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 7; ++j) logits(i, j) += enc.head.b(0, j);
  for (int i = 0; i < 4; ++i)
    logits(i, kMaskToken) = -std::numeric_limits<double>::infinity();
  Matrix expect_grid = softmax_rows(logits);
  for (int64_t i = 0; i < expect_grid.size(); ++i)
    CHECK_NEAR(out.grid.probs.data()[i], expect_grid.data()[i], 1e-15);
}

void test_encode_grid_rows_normalized() {
  Rng rng(5);
  EncoderStack enc = tiny_encoder(9, rng);
  Matrix feats = random_features(6, 6, rng);
  EncoderStack::Encoded out = enc.encode(feats);
  for (int t = 0; t < out.grid.frames(); ++t) {
    double sum = 0.0;
    for (int v = 0; v < out.grid.vocab(); ++v) sum += out.grid.probs(t, v);
    CHECK_NEAR(sum, 1.0, 1e-12);
    // The mask column is suppressed.
    CHECK_NEAR(out.grid.probs(t, kMaskToken), 0.0, 0.0);
  }
}

void test_encode_deterministic() {
  Rng rng1(11), rng2(11);
  EncoderStack a = tiny_encoder(7, rng1);
  EncoderStack b = tiny_encoder(7, rng2);
  Rng frng(13);
  Matrix feats = random_features(5, 6, frng);
  EncoderStack::Encoded ea = a.encode(feats);
  EncoderStack::Encoded eb = b.encode(feats);
  CHECK(ea.memory == eb.memory);          // bit-identical
  CHECK(ea.grid.probs == eb.grid.probs);  // bit-identical
  CHECK_THROWS(a.encode(Matrix(3, 5)));   // wrong feature dim
}

void test_initial_mask() {
  std::vector<int> tokens = {4, 5, 6};
  std::vector<int> masked_positions;
  std::vector<int> masked =
      initial_mask(tokens, {0.9, 0.3, 0.8}, 0.5, &masked_positions);
  CHECK(masked == (std::vector<int>{4, kMaskToken, 6}));
  CHECK(masked_positions == (std::vector<int>{1}));

  initial_mask(tokens, {0.9, 0.3, 0.8}, 0.0, &masked_positions);
  CHECK(masked_positions.empty());

  // p_thr = 1.0 masks everything below full confidence.
  initial_mask(tokens, {1.0, 0.3, 0.8}, 1.0, &masked_positions);
  CHECK(masked_positions == (std::vector<int>{1, 2}));

  MaskCtcConfig bad;
  bad.p_thr = 1.5;
  CHECK_THROWS(bad.validate());
}

void test_refine_no_masks_is_noop() {
  Rng rng(17);
  Cmlm cmlm = tiny_cmlm(7, rng);
  Matrix memory = random_features(4, 8, rng);
  std::vector<int> tokens = {2, 3, 4};
  RefineResult r = mask_predict_refine(tokens, memory, cmlm, 3);
  CHECK(r.tokens == tokens);
  CHECK(r.trace.empty());
}

void test_refine_single_mask_single_pass() {
  Rng rng(19);
  Cmlm cmlm = tiny_cmlm(7, rng);
  Matrix memory = random_features(4, 8, rng);
  std::vector<int> tokens = {2, kMaskToken, 4};
  RefineResult r = mask_predict_refine(tokens, memory, cmlm, 1);
  CHECK_EQ(r.trace.size(), 1);

  Matrix probs = cmlm.forward_probs(tokens, memory);
  int best = 0;
  for (int v = 1; v < probs.cols(); ++v)
    if (probs(1, v) > probs(1, best)) best = v;
  CHECK_EQ(r.tokens[1], best);
  CHECK_NEAR(r.fill_prob[1], probs(1, best), 0.0);
  CHECK_EQ(r.tokens[0], 2);
  CHECK_EQ(r.tokens[2], 4);
}

void test_refine_easy_first_schedule() {
  // M=4 masks with K=2: exactly two positions commit per pass, and the first
  // pair's fill probabilities dominate the second pair's at their own
  // decision steps. Replayed step by step against recorded CMLM outputs.
  Rng rng(23);
  Cmlm cmlm = tiny_cmlm(9, rng);
  Matrix memory = random_features(5, 8, rng);
  std::vector<int> tokens = {kMaskToken, kMaskToken, kMaskToken, kMaskToken, 3};

  RefineResult r = mask_predict_refine(tokens, memory, cmlm, 2);
  CHECK_EQ(r.trace.size(), 2);
  CHECK_EQ(r.trace[0].filled_positions.size(), 2);
  CHECK_EQ(r.trace[1].filled_positions.size(), 2);
  CHECK(r.trace[0].masked_positions == (std::vector<int>{0, 1, 2, 3}));
  CHECK(r.trace[1].masked_positions == r.trace[1].filled_positions);

  // Independent replay: first pass on the fully masked sequence.
  std::vector<int> replay = tokens;
  Matrix p1 = cmlm.forward_probs(replay, memory);
  struct Cand { int pos, tok; double p; };
  std::vector<Cand> cands;
  for (int pos = 0; pos < 4; ++pos) {
    int best = 0;
    for (int v = 1; v < p1.cols(); ++v)
      if (p1(pos, v) > p1(pos, best)) best = v;
    cands.push_back(Cand{pos, best, p1(pos, best)});
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& a, const Cand& b) { return a.p > b.p; });
  std::vector<int> first = {cands[0].pos, cands[1].pos};
  std::sort(first.begin(), first.end());
  CHECK(r.trace[0].filled_positions == first);
  replay[cands[0].pos] = cands[0].tok;
  replay[cands[1].pos] = cands[1].tok;

  // Second pass conditions on the first commits.
  Matrix p2 = cmlm.forward_probs(replay, memory);
  double min_first = std::min(cands[0].p, cands[1].p);
  for (int pos : r.trace[1].filled_positions) {
    int best = 0;
    for (int v = 1; v < p2.cols(); ++v)
      if (p2(pos, v) > p2(pos, best)) best = v;
    CHECK_EQ(r.tokens[pos], best);
    CHECK_NEAR(r.fill_prob[pos], p2(pos, best), 0.0);
    // Easy-first: the first pair was at least as confident at its own step.
    CHECK(min_first >= cands[2].p - 1e-15);
  }
  CHECK(r.tokens[cands[0].pos] == cands[0].tok);
  CHECK(std::none_of(r.tokens.begin(), r.tokens.end(),
                     [](int t) { return t == kMaskToken; }));
}

void test_dictate_pthr_zero_equals_greedy_collapse() {
  Rng rng(29);
  EncoderStack enc = tiny_encoder(7, rng);
  Cmlm cmlm = tiny_cmlm(7, rng);
  Matrix feats = random_features(10, 6, rng);
  MaskCtcConfig cfg;
  cfg.p_thr = 0.0;
  cfg.iters = 4;

  DictationResult res = dictate(feats, enc, cmlm, cfg);
  EncoderStack::Encoded encoded = enc.encode(feats);
  std::vector<TokenSpan> spans = collapse(greedy_path(encoded.grid));
  std::vector<double> conf =
      token_confidence(encoded.grid, spans, ConfidenceMode::kMax);
  CHECK_EQ(res.tokens.size(), spans.size());
  for (size_t i = 0; i < spans.size(); ++i) {
    CHECK_EQ(res.tokens[i], spans[i].token);
    CHECK_NEAR(res.confidences[i], conf[i], 0.0);
  }
  CHECK(res.trace.empty());
  CHECK(res.decode_seconds >= 0.0);
}

void test_dictate_empty_output() {
  // A grid that greedy-decodes to all blanks dictates an empty sequence.
  Rng rng(31);
  Cmlm cmlm = tiny_cmlm(5, rng);
  Matrix m(3, 5);
  for (int t = 0; t < 3; ++t) {
    m(t, kCtcBlank) = 0.6;
    for (int v = 1; v < 5; ++v) m(t, v) = 0.1;
  }
  PosteriorGrid grid = PosteriorGrid::validated(std::move(m));
  DictationResult res =
      dictate_from_grid(grid, Matrix(3, 8), cmlm, MaskCtcConfig{});
  CHECK(res.tokens.empty());
  CHECK(res.confidences.empty());
  CHECK(res.trace.empty());
}

void test_dictate_invariants_random_models() {
  Rng rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    int vocab = 5 + static_cast<int>(rng.bounded(4));
    Rng mrng(rng.next_u64());
    Cmlm cmlm = tiny_cmlm(vocab, mrng);
    int S = 3 + static_cast<int>(rng.bounded(5));
    std::vector<int> tokens;
    std::vector<double> conf;
    for (int i = 0; i < S; ++i) {
      tokens.push_back(2 + static_cast<int>(rng.bounded(vocab - 2)));
      // Keep the token the argmax of its frame: above 1/vocab (vocab >= 5).
      conf.push_back(0.22 + 0.73 * rng.uniform());
    }
    PosteriorGrid grid = grid_with_confidences(tokens, conf, vocab);
    Matrix memory = random_features(grid.frames(), 8, mrng);

    MaskCtcConfig cfg;
    const double thresholds[] = {0.0, 0.3, 0.5, 0.8, 1.0};
    cfg.p_thr = thresholds[rng.bounded(5)];
    cfg.iters = 1 + static_cast<int>(rng.bounded(4));
    DictationResult res = dictate_from_grid(grid, memory, cmlm, cfg);

    CHECK_EQ(res.tokens.size(), tokens.size());
    int masked = 0;
    for (size_t i = 0; i < tokens.size(); ++i) {
      CHECK(res.tokens[i] != kCtcBlank && res.tokens[i] != kMaskToken);
      double ctc_conf = grid.probs(2 * static_cast<int>(i), tokens[i]);
      if (ctc_conf >= cfg.p_thr) {
        CHECK_EQ(res.tokens[i], tokens[i]);  // confident tokens survive
        CHECK_NEAR(res.confidences[i], ctc_conf, 1e-12);
      } else {
        ++masked;
      }
    }
    CHECK(static_cast<int>(res.trace.size()) <= cfg.iters);
    int per_iter = masked == 0 ? 0 : (masked + cfg.iters - 1) / cfg.iters;
    int committed = 0;
    for (size_t k = 0; k < res.trace.size(); ++k) {
      int n = static_cast<int>(res.trace[k].filled_positions.size());
      committed += n;
      if (k + 1 < res.trace.size())
        CHECK_EQ(n, per_iter);
      else
        CHECK(n <= per_iter && n > 0);
    }
    CHECK_EQ(committed, masked);
  }
}

void test_cmlm_loss_uniform_and_perfect() {
  // All-zero weights give uniform logits; the banned blank/mask columns
  // leave vocab-2 candidates, so the loss is ln(V-2).
  Rng rng(41);
  Cmlm cmlm = tiny_cmlm(8, rng);
  cmlm.visit_params("cmlm", [](const std::string&, Matrix& m) {
    for (int64_t i = 0; i < m.size(); ++i) m.data()[i] = 0.0;
  });
  Matrix memory(4, 8);
  std::vector<int> masked = {kMaskToken, 3, kMaskToken};
  std::vector<int> reference = {2, 3, 5};
  double loss = cmlm_masked_crossentropy(cmlm, masked, memory, reference);
  CHECK_NEAR(loss, std::log(8.0 - 2.0), 1e-12);

  // A large bias on the reference token makes the prediction (nearly) exact.
  Cmlm sharp = tiny_cmlm(8, rng);
  sharp.visit_params("cmlm", [](const std::string&, Matrix& m) {
    for (int64_t i = 0; i < m.size(); ++i) m.data()[i] = 0.0;
  });
  sharp.out_proj.b(0, 5) = 50.0;
  double zero_loss = cmlm_masked_crossentropy(sharp, {kMaskToken}, Matrix(2, 8), {5});
  CHECK_NEAR(zero_loss, 0.0, 1e-9);

  CHECK_THROWS(cmlm_masked_crossentropy(cmlm, {3, 4}, memory, {3, 4}));
}

void test_cmlm_gradcheck() {
  Rng rng(43);
  Cmlm cmlm = tiny_cmlm(6, rng);
  Matrix memory = random_features(3, 8, rng);
  std::vector<int> masked = {kMaskToken, 4, kMaskToken};
  std::vector<int> reference = {3, 4, 2};
  std::vector<nn::ParamRef> params;
  cmlm.visit_params("cmlm", [&](const std::string& name, Matrix& m) {
    params.push_back(nn::ParamRef{name, &m});
  });
  double err = nn::gradcheck(
      [&](nn::Tape& t) {
        return cmlm_masked_crossentropy(t, cmlm, masked, t.leaf(memory),
                                        reference);
      },
      params);
  CHECK(err < 1e-6);
}

}  // namespace mdd

int main() {
  using mdd::test::Case;
  return mdd::test::run({
      Case{"encode_zero_blocks", mdd::test_encode_zero_blocks},
      Case{"encode_grid_rows_normalized", mdd::test_encode_grid_rows_normalized},
      Case{"encode_deterministic", mdd::test_encode_deterministic},
      Case{"initial_mask", mdd::test_initial_mask},
      Case{"refine_no_masks_is_noop", mdd::test_refine_no_masks_is_noop},
      Case{"refine_single_mask_single_pass",
           mdd::test_refine_single_mask_single_pass},
      Case{"refine_easy_first_schedule", mdd::test_refine_easy_first_schedule},
      Case{"dictate_pthr_zero_equals_greedy_collapse",
           mdd::test_dictate_pthr_zero_equals_greedy_collapse},
      Case{"dictate_empty_output", mdd::test_dictate_empty_output},
      Case{"dictate_invariants_random_models",
           mdd::test_dictate_invariants_random_models},
      Case{"cmlm_loss_uniform_and_perfect",
           mdd::test_cmlm_loss_uniform_and_perfect},
      Case{"cmlm_gradcheck", mdd::test_cmlm_gradcheck},
  });
}
