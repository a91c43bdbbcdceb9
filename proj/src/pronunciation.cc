// src/pronunciation.cc

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

#include "mdd/pronunciation.h"

#include "mdd/maskctc.h"

namespace mdd {

const char* label_name(PronunciationLabel l) {
  return l == PronunciationLabel::kCorrect ? "correct" : "mispronounced";
}

PronunciationLabel parse_label(const std::string& s) {
  if (s == "correct") return PronunciationLabel::kCorrect;
  if (s == "mispronounced") return PronunciationLabel::kMispronounced;
  fail(str_cat("unknown judgement label '", s, "'"));
}

PmWeights PmWeights::create(const PmConfig& cfg, Rng& rng) {
  require(cfg.vocab >= 3, "PM vocabulary must cover blank, mask and phones");
  require(cfg.n_gru >= 1, "PM needs at least one prompt GRU layer");
  PmWeights w;
  w.cfg = cfg;
  w.embed = Matrix(cfg.vocab, cfg.d_e);
  nn::init_linear(w.embed, rng, cfg.d_e);
  w.in_proj = nn::LinearLayer(cfg.d_e + 1, cfg.d_h);
  w.in_proj.init(rng);
  for (int i = 0; i < cfg.n_blocks; ++i) {
    w.blocks.emplace_back(cfg.d_h, cfg.n_heads, cfg.d_f, false);
    w.blocks.back().init(rng);
  }
  for (int i = 0; i < cfg.n_gru; ++i) {
    w.gru.emplace_back(i == 0 ? cfg.d_e : cfg.d_a, cfg.d_a);
    w.gru.back().init(rng);
  }
  w.gate_W1 = Matrix(cfg.d_h + cfg.d_a, cfg.d_h);
  nn::init_linear(w.gate_W1, rng, w.gate_W1.rows());
  w.gate_b1 = Matrix(1, cfg.d_h);
  w.gate_W2 = Matrix(cfg.d_h, cfg.d_h);
  nn::init_linear(w.gate_W2, rng, w.gate_W2.rows());
  w.gate_b2 = Matrix(1, cfg.d_h);
  w.decision = nn::FeedForward(cfg.d_h, cfg.d_f, 2);
  w.decision.init(rng);
  return w;
}

void PmWeights::visit_params(const std::string& prefix, const nn::ParamVisitor& v) {
  v(prefix + ".embed", embed);
  in_proj.visit(prefix + ".in_proj", v);
  for (size_t i = 0; i < blocks.size(); ++i)
    blocks[i].visit(prefix + ".block" + std::to_string(i), v);
  for (size_t i = 0; i < gru.size(); ++i)
    gru[i].visit(prefix + ".gru" + std::to_string(i), v);
  v(prefix + ".gate.W1", gate_W1);
  v(prefix + ".gate.b1", gate_b1);
  v(prefix + ".gate.W2", gate_W2);
  v(prefix + ".gate.b2", gate_b2);
  decision.visit(prefix + ".decision", v);
}

void validate_pm_input(const PmInput& input, const PmWeights& w) {
  require(!input.dictated.empty(), "PM input needs at least one dictated phone");
  require(!input.prompt.empty(), "PM input needs a non-empty prompt");
  require(input.dictated.size() == input.confidences.size(),
          "dictated/confidences length mismatch");
  for (int id : input.dictated)
    require(id != kCtcBlank && id != kMaskToken && 0 <= id && id < w.cfg.vocab,
            "dictated ids must be phone ids (no blank or mask)");
  for (double c : input.confidences)
    require(c >= 0.0 && c <= 1.0, "confidence outside [0,1]");
  for (int id : input.prompt)
    require(id != kCtcBlank && id != kMaskToken && 0 <= id && id < w.cfg.vocab,
            "prompt ids must be phone ids");
}

namespace {

nn::Var embed_with_confidence_var(nn::Tape& t, const std::vector<int>& dictated,
                                  const std::vector<double>& confidences,
                                  const PmWeights& w) {
  Matrix conf(static_cast<int>(confidences.size()), 1);
  for (size_t i = 0; i < confidences.size(); ++i)
    conf(static_cast<int>(i), 0) = confidences[i];
  nn::Var emb = t.gather_rows(t.leaf(w.embed), dictated);
  return t.concat_cols(emb, t.constant(std::move(conf)));
}

nn::Var encode_prompt_var(nn::Tape& t, const std::vector<int>& prompt,
                          const PmWeights& w) {
  nn::Var x = t.gather_rows(t.leaf(w.embed), prompt);
  nn::Var final_state{};
  for (const nn::GruLayer& layer : w.gru) {
    auto [states, final] = layer.forward(t, x);
    x = states;
    final_state = final;
  }
  return final_state;
}

nn::Var pmg_gate_var(nn::Tape& t, nn::Var h, nn::Var prompt_embedding,
                     const PmWeights& w) {
  int S = t.value(h).rows();
  nn::Var a = t.broadcast_row(prompt_embedding, S);
  nn::Var pre = t.add_rowvec(t.matmul(t.concat_cols(h, a), t.leaf(w.gate_W1)),
                             t.leaf(w.gate_b1));
  return t.sigmoid(pre);
}

nn::Var pmg_modulate_var(nn::Tape& t, nn::Var h, nn::Var gate,
                         const PmWeights& w) {
  nn::Var mod = t.add_rowvec(t.matmul(t.mul(h, gate), t.leaf(w.gate_W2)),
                             t.leaf(w.gate_b2));
  return t.relu(t.add(h, mod));
}

// Decision logits (S x 2) of the full model.
nn::Var pm_logits_var(nn::Tape& t, const PmInput& input, const PmWeights& w) {
  validate_pm_input(input, w);
  int S = static_cast<int>(input.dictated.size());
  nn::Var x = w.in_proj.forward(
      t, embed_with_confidence_var(t, input.dictated, input.confidences, w));
  x = t.add(x, t.constant(nn::sinusoidal_positions(S, w.cfg.d_h)));
  for (const nn::TransformerBlock& b : w.blocks) x = b.forward(t, x, nullptr);
  nn::Var a_e = encode_prompt_var(t, input.prompt, w);
  nn::Var gate = pmg_gate_var(t, x, a_e, w);
  nn::Var modulated = pmg_modulate_var(t, x, gate, w);
  return w.decision.forward(t, modulated);
}

}  // namespace

Matrix embed_with_confidence(const std::vector<int>& dictated,
                             const std::vector<double>& confidences,
                             const PmWeights& w) {
  require(dictated.size() == confidences.size(),
          "dictated/confidences length mismatch");
  for (double c : confidences)
    require(c >= 0.0 && c <= 1.0, "confidence outside [0,1]");
  nn::Tape t;
  return t.value(embed_with_confidence_var(t, dictated, confidences, w));
}

Matrix encode_prompt(const std::vector<int>& prompt, const PmWeights& w) {
  require(!prompt.empty(), "empty prompt");
  nn::Tape t;
  return t.value(encode_prompt_var(t, prompt, w));
}

Matrix pmg_gate(const Matrix& h, const Matrix& prompt_embedding,
                const PmWeights& w) {
  require(prompt_embedding.rows() == 1 && prompt_embedding.cols() == w.cfg.d_a,
          "prompt embedding must be 1 x d_a");
  require(h.cols() == w.cfg.d_h, "h must have d_h columns");
  nn::Tape t;
  return t.value(pmg_gate_var(t, t.leaf(h), t.leaf(prompt_embedding), w));
}

Matrix pmg_modulate(const Matrix& h, const Matrix& gate, const PmWeights& w) {
  require(h.same_shape(gate), "h and gate shapes differ");
  require(h.cols() == w.cfg.d_h, "h must have d_h columns");
  nn::Tape t;
  return t.value(pmg_modulate_var(t, t.leaf(h), t.leaf(gate), w));
}

nn::Var pm_probabilities(nn::Tape& t, const PmInput& input, const PmWeights& w) {
  return t.softmax_rows(pm_logits_var(t, input, w));
}

std::vector<Judgement> pm_forward(const PmInput& input, const PmWeights& w) {
  nn::Tape t;
  Matrix probs = t.value(pm_probabilities(t, input, w));
  std::vector<Judgement> out;
  out.reserve(probs.rows());
  for (int s = 0; s < probs.rows(); ++s) {
    // Column 0 = correct; a tie at exactly 0.5 goes to correct.
    bool mis = probs(s, 1) > probs(s, 0);
    out.push_back(Judgement{s,
                            mis ? PronunciationLabel::kMispronounced
                                : PronunciationLabel::kCorrect,
                            mis ? probs(s, 1) : probs(s, 0)});
  }
  return out;
}

nn::Var pm_crossentropy(nn::Tape& t, const PmInput& input, const PmWeights& w,
                        const std::vector<int>& labels) {
  require(labels.size() == input.dictated.size(),
          "labels must align with the dictated sequence");
  for (int l : labels) require(l == 0 || l == 1, "labels must be 0 or 1");
  nn::Var lp = t.log_softmax_rows(pm_logits_var(t, input, w));
  std::vector<int> rows(labels.size());
  for (size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
  return t.nll_rows(lp, labels, rows);
}

}  // namespace mdd
