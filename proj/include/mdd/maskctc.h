// include/mdd/maskctc.h

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

#ifndef MDD_MASKCTC_H_
#define MDD_MASKCTC_H_

#include <vector>

#include "mdd/ctc.h"
#include "mdd/layers.h"

namespace mdd {

// Token id 1 is the mask in every inventory (blank is 0).
constexpr int kMaskToken = 1;

struct EncoderConfig {
  int d_feat = 80;
  int d_model = 64;
  int n_blocks = 2;
  int n_heads = 4;
  int d_ff = 128;
  int vocab = 0;  // full inventory size, blank at column 0
};

// Acoustic encoder: input projection + positional encodings + self-attention
// blocks, with a softmax head producing frame-wise phone posteriors. Column 1
// (the mask token) is suppressed in the posterior head output.
struct EncoderStack {
  EncoderConfig cfg;
  nn::LinearLayer in_proj;
  std::vector<nn::TransformerBlock> blocks;
  nn::LinearLayer head;

  static EncoderStack create(const EncoderConfig& cfg, Rng& rng);

  struct Encoded {
    Matrix memory;       // T x d_model
    PosteriorGrid grid;  // T x vocab
  };
  Encoded encode(const Matrix& features) const;

  void visit_params(const std::string& prefix, const nn::ParamVisitor& v);
};

struct CmlmConfig {
  int vocab = 0;
  int d_model = 64;
  int n_blocks = 2;
  int n_heads = 4;
  int d_ff = 128;
};

// Conditional masked LM over phone tokens: self-attention plus
// cross-attention over the encoder memory. Token ids share the inventory id
// space; blank and mask can never be produced as outputs.
struct Cmlm {
  CmlmConfig cfg;
  Matrix embed;  // vocab x d_model (blank row unused)
  std::vector<nn::TransformerBlock> blocks;
  nn::LinearLayer out_proj;

  static Cmlm create(const CmlmConfig& cfg, Rng& rng);

  // Output logits over the token set; blank/mask columns are -inf.
  nn::Var forward_logits(nn::Tape& t, const std::vector<int>& tokens,
                         nn::Var memory) const;
  // Row-softmax of forward_logits.
  Matrix forward_probs(const std::vector<int>& tokens, const Matrix& memory) const;

  void visit_params(const std::string& prefix, const nn::ParamVisitor& v);
};

struct MaskCtcConfig {
  double p_thr = 0.5;
  int iters = 10;
  ConfidenceMode conf_mode = ConfidenceMode::kMax;
  void validate() const;
};

struct RefineStep {
  std::vector<int> masked_positions;  // still masked entering the iteration
  std::vector<int> filled_positions;  // committed this iteration
};

struct DictationResult {
  std::vector<int> tokens;
  std::vector<double> confidences;
  std::vector<RefineStep> trace;  // one entry per CMLM pass
  double decode_seconds = 0.0;
};

// Replaces tokens with confidence < p_thr by the mask token; reports the
// masked position set.
std::vector<int> initial_mask(const std::vector<int>& tokens,
                              const std::vector<double>& confidences,
                              double p_thr, std::vector<int>* masked_positions);

struct RefineResult {
  std::vector<int> tokens;
  std::vector<double> fill_prob;  // valid at refined positions, else -1
  std::vector<RefineStep> trace;
};

// Easy-first mask-predict: with M initially masked positions, each of the
// (at most) `iters` passes commits the ceil(M/iters) still-masked positions
// with the highest top predicted probability (leftmost on ties). Committed
// positions are never revisited.
RefineResult mask_predict_refine(std::vector<int> tokens, const Matrix& memory,
                                 const Cmlm& cmlm, int iters);

// CTC greedy collapse -> confidence threshold masking -> CMLM refinement.
DictationResult dictate(const Matrix& features, const EncoderStack& enc,
                        const Cmlm& cmlm, const MaskCtcConfig& cfg);
// Same, starting from a stored posterior grid and memory (encoder bypassed).
DictationResult dictate_from_grid(const PosteriorGrid& grid, const Matrix& memory,
                                  const Cmlm& cmlm, const MaskCtcConfig& cfg);

// Mean negative log-probability of the reference tokens at masked positions.
nn::Var cmlm_masked_crossentropy(nn::Tape& t, const Cmlm& cmlm,
                                 const std::vector<int>& masked_tokens,
                                 nn::Var memory,
                                 const std::vector<int>& reference);
double cmlm_masked_crossentropy(const Cmlm& cmlm,
                                const std::vector<int>& masked_tokens,
                                const Matrix& memory,
                                const std::vector<int>& reference);

}  // namespace mdd

#endif  // MDD_MASKCTC_H_
