// include/mdd/pronunciation.h

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

#ifndef MDD_PRONUNCIATION_H_
#define MDD_PRONUNCIATION_H_

#include <vector>

#include "mdd/layers.h"

namespace mdd {

enum class PronunciationLabel { kCorrect, kMispronounced };

const char* label_name(PronunciationLabel l);
PronunciationLabel parse_label(const std::string& s);

// Per-phone decision with the probability of the chosen label (>= 0.5,
// being the argmax of a two-way softmax).
struct Judgement {
  int position = -1;
  PronunciationLabel label = PronunciationLabel::kCorrect;
  double probability = 0.0;
};

struct PmInput {
  std::vector<int> dictated;          // length S, no blank/mask ids
  std::vector<double> confidences;    // length S, in [0,1]
  std::vector<int> prompt;            // length L, canonical ids
};

struct PmConfig {
  int vocab = 0;
  int d_e = 64;   // phone embedding size
  int d_h = 128;  // encoder width
  int d_a = 128;  // prompt GRU hidden size
  int d_f = 128;  // decision FFN hidden size
  int n_blocks = 2;
  int n_heads = 4;
  int n_gru = 1;
};

// Pronunciation model: confidence-augmented phone embeddings through a
// self-attention encoder, a GRU prompt embedding, a prompt-modulated gate,
// and a two-way softmax decision head. One embedding table serves both the
// dictated and the prompt phones.
struct PmWeights {
  PmConfig cfg;
  Matrix embed;  // vocab x d_e
  nn::LinearLayer in_proj;  // (d_e+1) x d_h
  std::vector<nn::TransformerBlock> blocks;
  std::vector<nn::GruLayer> gru;  // d_e -> d_a (-> d_a ...)
  Matrix gate_W1;  // (d_h + d_a) x d_h
  Matrix gate_b1;  // 1 x d_h
  Matrix gate_W2;  // d_h x d_h
  Matrix gate_b2;  // 1 x d_h
  nn::FeedForward decision;  // d_h -> d_f -> 2

  static PmWeights create(const PmConfig& cfg, Rng& rng);
  void visit_params(const std::string& prefix, const nn::ParamVisitor& v);
};

void validate_pm_input(const PmInput& input, const PmWeights& w);

// Embedding of each dictated phone with its confidence appended: S x (d_e+1).
Matrix embed_with_confidence(const std::vector<int>& dictated,
                             const std::vector<double>& confidences,
                             const PmWeights& w);

// Utterance-level prompt embedding: final hidden state of the last GRU layer.
Matrix encode_prompt(const std::vector<int>& prompt, const PmWeights& w);

// Gate g = sigmoid([h ; a_E] W1 + b1), rows of h gated independently.
Matrix pmg_gate(const Matrix& h, const Matrix& prompt_embedding, const PmWeights& w);
// Modulation h' = relu(h + (h .* g) W2 + b2).
Matrix pmg_modulate(const Matrix& h, const Matrix& gate, const PmWeights& w);

// Full forward pass: one judgement per dictated phone.
std::vector<Judgement> pm_forward(const PmInput& input, const PmWeights& w);

// Two-way probabilities (S x 2, column 0 = correct) on a caller tape;
// shared by pm_forward and the cross-entropy loss.
nn::Var pm_probabilities(nn::Tape& t, const PmInput& input, const PmWeights& w);

// Mean cross-entropy of the judgements against labels (0 = correct,
// 1 = mispronounced).
nn::Var pm_crossentropy(nn::Tape& t, const PmInput& input, const PmWeights& w,
                        const std::vector<int>& labels);

}  // namespace mdd

#endif  // MDD_PRONUNCIATION_H_
