// src/ctc.cc

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

#include "mdd/ctc.h"

#include <cmath>
#include <limits>

namespace mdd {

namespace {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

PosteriorGrid PosteriorGrid::validated(Matrix probs) {
  require(probs.rows() >= 1 && probs.cols() >= 2,
          "posterior grid needs at least one frame and two columns");
  for (int t = 0; t < probs.rows(); ++t) {
    double sum = 0.0;
    for (int v = 0; v < probs.cols(); ++v) {
      double p = probs(t, v);
      require(p >= 0.0 && p <= 1.0,
              str_cat("posterior out of [0,1] at frame ", t, " column ", v));
      sum += p;
    }
    require(std::abs(sum - 1.0) <= 1e-9,
            str_cat("posterior row ", t, " sums to ", sum));
  }
  return PosteriorGrid{std::move(probs)};
}

PosteriorGrid PosteriorGrid::from_single_precision(Matrix probs) {
  require(probs.rows() >= 1 && probs.cols() >= 2,
          "posterior grid needs at least one frame and two columns");
  for (int t = 0; t < probs.rows(); ++t) {
    double sum = 0.0;
    for (int v = 0; v < probs.cols(); ++v) {
      double p = probs(t, v);
      require(p >= 0.0 && p <= 1.0,
              str_cat("posterior out of [0,1] at frame ", t, " column ", v));
      sum += p;
    }
    require(std::abs(sum - 1.0) <= 1e-4,
            str_cat("posterior row ", t, " sums to ", sum));
    for (int v = 0; v < probs.cols(); ++v) probs(t, v) /= sum;
  }
  return PosteriorGrid{std::move(probs)};
}

ConfidenceMode parse_confidence_mode(const std::string& s) {
  if (s == "max") return ConfidenceMode::kMax;
  if (s == "mean") return ConfidenceMode::kMean;
  if (s == "product") return ConfidenceMode::kProduct;
  fail(str_cat("unknown confidence mode '", s, "' (max|mean|product)"));
}

const char* confidence_mode_name(ConfidenceMode m) {
  switch (m) {
    case ConfidenceMode::kMax: return "max";
    case ConfidenceMode::kMean: return "mean";
    case ConfidenceMode::kProduct: return "product";
  }
  return "?";
}

std::vector<int> greedy_path(const PosteriorGrid& grid) {
  require(grid.frames() >= 1, "greedy_path on empty grid");
  std::vector<int> path(grid.frames());
  for (int t = 0; t < grid.frames(); ++t) {
    int best = 0;
    for (int v = 1; v < grid.vocab(); ++v)
      if (grid.probs(t, v) > grid.probs(t, best)) best = v;
    path[t] = best;
  }
  return path;
}

std::vector<TokenSpan> collapse(const std::vector<int>& path) {
  std::vector<TokenSpan> spans;
  size_t t = 0;
  while (t < path.size()) {
    size_t start = t;
    while (t + 1 < path.size() && path[t + 1] == path[start]) ++t;
    if (path[start] != kCtcBlank)
      spans.push_back(TokenSpan{path[start], static_cast<int>(start),
                                static_cast<int>(t), -1.0});
    ++t;
  }
  return spans;
}

std::vector<double> token_confidence(const PosteriorGrid& grid,
                                     std::span<TokenSpan> spans,
                                     ConfidenceMode mode) {
  std::vector<double> out;
  out.reserve(spans.size());
  for (TokenSpan& s : spans) {
    require(0 <= s.start_frame && s.start_frame <= s.end_frame &&
                s.end_frame < grid.frames(),
            "token span outside grid");
    double c;
    switch (mode) {
      case ConfidenceMode::kMax: {
        c = 0.0;
        for (int t = s.start_frame; t <= s.end_frame; ++t)
          c = std::max(c, grid.probs(t, s.token));
        break;
      }
      case ConfidenceMode::kMean: {
        c = 0.0;
        for (int t = s.start_frame; t <= s.end_frame; ++t)
          c += grid.probs(t, s.token);
        c /= (s.end_frame - s.start_frame + 1);
        break;
      }
      case ConfidenceMode::kProduct: {
        c = 1.0;
        for (int t = s.start_frame; t <= s.end_frame; ++t)
          c *= grid.probs(t, s.token);
        break;
      }
    }
    s.confidence = c;
    out.push_back(c);
  }
  return out;
}

double ctc_forward_logprob(const PosteriorGrid& grid,
                           const std::vector<int>& labels) {
  int T = grid.frames();
  for (int l : labels)
    require(l != kCtcBlank && 0 < l && l < grid.vocab(),
            "labels must be non-blank ids inside the grid vocabulary");

  // Empty label sequence: the all-blank path.
  if (labels.empty()) {
    double lp = 0.0;
    for (int t = 0; t < T; ++t) lp += std::log(grid.probs(t, kCtcBlank));
    return lp;
  }

  // Augmented label row: blank, l1, blank, l2, ..., blank.
  int L = static_cast<int>(labels.size());
  int S = 2 * L + 1;
  auto aug = [&](int s) { return (s % 2 == 1) ? labels[s / 2] : kCtcBlank; };

  std::vector<double> alpha(S, kLogZero), next(S, kLogZero);
  alpha[0] = std::log(grid.probs(0, kCtcBlank));
  alpha[1] = std::log(grid.probs(0, labels[0]));

  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      double acc = alpha[s];
      if (s >= 1) acc = log_add(acc, alpha[s - 1]);
      // Skip transition allowed into a non-blank differing from the label
      // two lattice rows back.
      if (s >= 2 && s % 2 == 1 && aug(s) != aug(s - 2))
        acc = log_add(acc, alpha[s - 2]);
      next[s] = acc == kLogZero ? kLogZero
                                : acc + std::log(grid.probs(t, aug(s)));
    }
    std::swap(alpha, next);
  }
  return log_add(alpha[S - 1], alpha[S - 2]);
}

}  // namespace mdd
