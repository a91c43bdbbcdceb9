// src/eval.cc

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

#include "mdd/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mdd {

std::vector<AlignmentOp> align(std::span<const std::string> ref,
                               std::span<const std::string> hyp) {
  require(!ref.empty(), "align: reference must be non-empty");
  int R = static_cast<int>(ref.size());
  int H = static_cast<int>(hyp.size());

  // dp[i][j]: cost of aligning ref[0..i) with hyp[0..j).
  std::vector<std::vector<int>> dp(R + 1, std::vector<int>(H + 1, 0));
  for (int i = 1; i <= R; ++i) dp[i][0] = i;
  for (int j = 1; j <= H; ++j) dp[0][j] = j;
  for (int i = 1; i <= R; ++i) {
    for (int j = 1; j <= H; ++j) {
      int diag = dp[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      int del = dp[i - 1][j] + 1;
      int ins = dp[i][j - 1] + 1;
      dp[i][j] = std::min({diag, del, ins});
    }
  }

  // Deterministic backtrace: diagonal, then delete, then insert.
  std::vector<AlignmentOp> ops;
  int i = R, j = H;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        dp[i][j] == dp[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      ops.push_back(AlignmentOp{ref[i - 1] == hyp[j - 1] ? EditKind::kMatch
                                                         : EditKind::kSubstitute,
                                i - 1, j - 1});
      --i;
      --j;
    } else if (i > 0 && dp[i][j] == dp[i - 1][j] + 1) {
      ops.push_back(AlignmentOp{EditKind::kDelete, i - 1, -1});
      --i;
    } else {
      ops.push_back(AlignmentOp{EditKind::kInsert, -1, j - 1});
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

EditCounts& EditCounts::operator+=(const EditCounts& o) {
  subs += o.subs;
  ins += o.ins;
  dels += o.dels;
  ref_len += o.ref_len;
  return *this;
}

EditCounts edit_counts(const std::vector<AlignmentOp>& ops, long ref_len) {
  EditCounts c;
  c.ref_len = ref_len;
  for (const AlignmentOp& op : ops) {
    switch (op.kind) {
      case EditKind::kMatch: break;
      case EditKind::kSubstitute: ++c.subs; break;
      case EditKind::kInsert: ++c.ins; break;
      case EditKind::kDelete: ++c.dels; break;
    }
  }
  return c;
}

double per(std::span<const std::string> ref, std::span<const std::string> hyp) {
  EditCounts c = edit_counts(align(ref, hyp), static_cast<long>(ref.size()));
  return static_cast<double>(c.errors()) / static_cast<double>(c.ref_len);
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  ta += o.ta;
  fr += o.fr;
  fa += o.fa;
  tr += o.tr;
  cd += o.cd;
  id += o.id;
  return *this;
}

namespace {

// Aligned partner of every canonical position: the paired sequence symbol,
// or absent on deletion. Optionally the paired hypothesis index.
std::vector<std::optional<std::string>> aligned_symbols(
    std::span<const std::string> canonical, std::span<const std::string> other,
    std::vector<int>* other_index) {
  std::vector<std::optional<std::string>> out(canonical.size());
  if (other_index) other_index->assign(canonical.size(), -1);
  for (const AlignmentOp& op : align(canonical, other)) {
    if (op.kind == EditKind::kMatch || op.kind == EditKind::kSubstitute) {
      out[op.ref_index] = other[op.hyp_index];
      if (other_index) (*other_index)[op.ref_index] = op.hyp_index;
    }
  }
  return out;
}

}  // namespace

ConfusionCounts classify(const UtteranceRecord& rec, const ClassifyOptions& opts) {
  require(!rec.canonical.empty(), str_cat(rec.utt_id, ": empty canonical sequence"));
  require(!rec.annotated.empty(), str_cat(rec.utt_id, ": empty annotated sequence"));
  require(rec.has_hypothesis, str_cat(rec.utt_id, ": record has no hypothesis"));
  if (opts.use_judgements) {
    require(rec.has_judgements,
            str_cat(rec.utt_id, ": judgements requested but absent"));
    require(rec.judgements.size() == rec.hypothesis.size(),
            str_cat(rec.utt_id, ": judgements not aligned to hypothesis"));
  }

  std::vector<std::optional<std::string>> truth =
      aligned_symbols(rec.canonical, rec.annotated, nullptr);
  std::vector<int> hyp_index;
  std::vector<std::optional<std::string>> sys =
      aligned_symbols(rec.canonical, rec.hypothesis, &hyp_index);

  ConfusionCounts c;
  for (size_t i = 0; i < rec.canonical.size(); ++i) {
    if (opts.skip_dels && (!truth[i] || !sys[i])) continue;

    bool truly_mis = !truth[i] || *truth[i] != rec.canonical[i];
    bool flagged = !sys[i] || *sys[i] != rec.canonical[i];
    if (!flagged && opts.use_judgements &&
        rec.judgements[hyp_index[i]].label == PronunciationLabel::kMispronounced)
      flagged = true;

    if (!truly_mis) {
      flagged ? ++c.fr : ++c.ta;
    } else if (!flagged) {
      ++c.fa;
    } else {
      ++c.tr;
      // Correct diagnosis: the system's aligned symbol (or deletion)
      // reproduces the annotation at this position.
      if (sys[i] == truth[i]) {
        ++c.cd;
      } else {
        ++c.id;
      }
    }
  }
  return c;
}

std::optional<double> f1(double pr, double re) {
  require(pr >= 0 && re >= 0, "f1 expects non-negative precision/recall");
  if (pr + re == 0.0) return std::nullopt;
  return 2.0 * pr * re / (pr + re);
}

namespace {

std::optional<double> ratio_pct(long num, long den) {
  if (den <= 0) return std::nullopt;
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> f1_opt(const std::optional<double>& pr,
                             const std::optional<double>& re) {
  if (!pr || !re) return std::nullopt;
  return f1(*pr, *re);
}

}  // namespace

MetricsReport detection_rates(const ConfusionCounts& c) {
  MetricsReport r;
  r.counts = c;
  r.cd_precision = ratio_pct(c.ta, c.ta + c.fa);
  r.cd_recall = ratio_pct(c.ta, c.ta + c.fr);
  r.cd_f1 = f1_opt(r.cd_precision, r.cd_recall);
  r.md_precision = ratio_pct(c.tr, c.tr + c.fr);
  r.md_recall = ratio_pct(c.tr, c.tr + c.fa);
  r.md_f1 = f1_opt(r.md_precision, r.md_recall);
  r.dar = ratio_pct(c.cd, c.cd + c.id);
  return r;
}

double rtf(double decode_seconds_total, double audio_seconds_total) {
  require(audio_seconds_total > 0, "rtf: total audio duration must be positive");
  return decode_seconds_total / audio_seconds_total;
}

MetricsReport report(std::span<const UtteranceRecord> corpus,
                     const ReportOptions& opts) {
  require(!corpus.empty(), "report: empty corpus");

  ConfusionCounts counts;
  EditCounts errors;
  bool timing_complete = true;
  double decode_total = 0.0, audio_total = 0.0;
  double dar_utt_sum = 0.0;
  long dar_utt_n = 0;

  for (const UtteranceRecord& rec : corpus) {
    ConfusionCounts c = classify(rec, opts.classify);
    counts += c;
    if (c.tr > 0) {
      dar_utt_sum += 100.0 * static_cast<double>(c.cd) / static_cast<double>(c.tr);
      ++dar_utt_n;
    }
    errors += edit_counts(align(rec.annotated, rec.hypothesis),
                          static_cast<long>(rec.annotated.size()));
    if (rec.duration_seconds > 0 && rec.decode_seconds >= 0) {
      audio_total += rec.duration_seconds;
      decode_total += rec.decode_seconds;
    } else {
      timing_complete = false;
    }
  }

  MetricsReport r = detection_rates(counts);
  r.errors = errors;
  r.num_utterances = static_cast<long>(corpus.size());
  r.per = ratio_pct(errors.errors(), errors.ref_len);
  if (opts.dar_per_utterance)
    r.dar = dar_utt_n > 0 ? std::optional<double>(dar_utt_sum / dar_utt_n)
                          : std::nullopt;
  if (timing_complete && audio_total > 0) {
    r.decode_seconds_total = decode_total;
    r.audio_seconds_total = audio_total;
    r.rtf = rtf(decode_total, audio_total);
  }
  return r;
}

namespace {

// Two decimals, half away from zero (rendering only).
double round2(double x) { return std::round(x * 100.0) / 100.0; }

std::string pct(const std::optional<double>& v) {
  if (!v) return "     --";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%7.2f", round2(*v));
  return buf;
}

}  // namespace

std::string render_report(const MetricsReport& r) {
  std::string out;
  out += "            PR       RE       F1\n";
  out += str_cat("CD     ", pct(r.cd_precision), "  ", pct(r.cd_recall), "  ",
                 pct(r.cd_f1), "\n");
  out += str_cat("MD     ", pct(r.md_precision), "  ", pct(r.md_recall), "  ",
                 pct(r.md_f1), "\n");
  out += str_cat("DAR    ", pct(r.dar), "   PER  ", pct(r.per));
  if (r.rtf) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *r.rtf);
    out += str_cat("   RTF  ", buf);
  }
  out += "\n";
  out += str_cat("counts: TA=", r.counts.ta, " FR=", r.counts.fr,
                 " FA=", r.counts.fa, " TR=", r.counts.tr, " CD=", r.counts.cd,
                 " ID=", r.counts.id, "\n");
  out += str_cat("errors: sub=", r.errors.subs, " ins=", r.errors.ins,
                 " del=", r.errors.dels, " ref=", r.errors.ref_len,
                 " utts=", r.num_utterances, "\n");
  return out;
}

}  // namespace mdd
