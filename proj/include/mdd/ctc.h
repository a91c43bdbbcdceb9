// include/mdd/ctc.h

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

#ifndef MDD_CTC_H_
#define MDD_CTC_H_

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mdd/matrix.h"

namespace mdd {

// Frame-wise phone posteriors, T x V with the blank in column 0. Rows are
// probability distributions.
struct PosteriorGrid {
  Matrix probs;

  int frames() const { return probs.rows(); }
  int vocab() const { return probs.cols(); }

  // Checks row sums (1 +- 1e-9) and the [0,1] range; throws on violation.
  static PosteriorGrid validated(Matrix probs);

  // For grids widened from single-precision storage: row sums may be off by
  // float rounding, so rows are re-normalized (after a 1e-4 sanity check).
  static PosteriorGrid from_single_precision(Matrix probs);
};

constexpr int kCtcBlank = 0;

// One surviving token after CTC collapse, with the frame run it came from.
struct TokenSpan {
  int token = -1;
  int start_frame = -1;
  int end_frame = -1;  // inclusive
  double confidence = -1.0;
};

enum class ConfidenceMode { kMax, kMean, kProduct };

ConfidenceMode parse_confidence_mode(const std::string& s);
const char* confidence_mode_name(ConfidenceMode m);

// Per-frame argmax; ties broken by the lowest id.
std::vector<int> greedy_path(const PosteriorGrid& grid);

// Merge consecutive repeats, then delete blanks. Spans keep the contributing
// frame run of each surviving token.
std::vector<TokenSpan> collapse(const std::vector<int>& path);

// Confidence of each token over its own span frames; also stored into the
// spans' confidence fields.
std::vector<double> token_confidence(const PosteriorGrid& grid,
                                     std::span<TokenSpan> spans,
                                     ConfidenceMode mode);

// Exact log P(labels | grid) over the CTC alignment lattice, log domain.
// Labels must not contain blank; an infeasible label sequence yields -inf.
double ctc_forward_logprob(const PosteriorGrid& grid,
                           const std::vector<int>& labels);

inline bool is_log_zero(double logprob) {
  return logprob == -std::numeric_limits<double>::infinity();
}

}  // namespace mdd

#endif  // MDD_CTC_H_
