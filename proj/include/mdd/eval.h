// include/mdd/eval.h

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

#ifndef MDD_EVAL_H_
#define MDD_EVAL_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdd/pronunciation.h"

namespace mdd {

enum class EditKind { kMatch, kSubstitute, kInsert, kDelete };

struct AlignmentOp {
  EditKind kind = EditKind::kMatch;
  int ref_index = -1;  // set for match/substitute/delete
  int hyp_index = -1;  // set for match/substitute/insert
};

// Minimum-edit-distance alignment with unit costs. Deterministic backtrace:
// diagonal (match/substitute) preferred, then delete, then insert.
std::vector<AlignmentOp> align(std::span<const std::string> ref,
                               std::span<const std::string> hyp);

struct EditCounts {
  long subs = 0, ins = 0, dels = 0;
  long ref_len = 0;
  long errors() const { return subs + ins + dels; }
  EditCounts& operator+=(const EditCounts& o);
};

EditCounts edit_counts(const std::vector<AlignmentOp>& ops, long ref_len);

// (S + I + D) / |ref| for one pair.
double per(std::span<const std::string> ref, std::span<const std::string> hyp);

// Hierarchical detection counts over canonical phone positions.
struct ConfusionCounts {
  long ta = 0;  // truth correct, system accepts
  long fr = 0;  // truth correct, system flags
  long fa = 0;  // truth mispronounced, system accepts
  long tr = 0;  // truth mispronounced, system flags
  long cd = 0;  // diagnoses among tr matching the annotation
  long id = 0;  // remaining tr
  ConfusionCounts& operator+=(const ConfusionCounts& o);
};

struct UtteranceRecord {
  std::string utt_id;
  std::vector<std::string> canonical;   // prompt phones
  std::vector<std::string> annotated;   // human-labeled actual pronunciation
  std::vector<std::string> hypothesis;  // dictation output
  bool has_hypothesis = false;
  std::vector<Judgement> judgements;
  bool has_judgements = false;
  double duration_seconds = -1.0;  // < 0 when absent
  double decode_seconds = -1.0;    // < 0 when absent
  std::vector<std::string> truth;  // optional per-canonical labels ok|sub|del
};

struct ClassifyOptions {
  bool use_judgements = false;
  // Drop canonical positions that are deleted in either the truth or the
  // system alignment.
  bool skip_dels = false;
};

// Ground truth comes from align(canonical, annotated): a canonical position
// is mispronounced iff it aligns to a different symbol or is deleted. The
// system flags a position iff its aligned hypothesis phone differs from the
// canonical phone, the position is deleted, or (with use_judgements) the
// model labeled the aligned hypothesis phone as mispronounced. Among flagged
// truly-mispronounced positions, the diagnosis is correct iff the system's
// aligned symbol (or deletion) equals the annotated one. Hypothesis
// insertions never enter these counts.
ConfusionCounts classify(const UtteranceRecord& rec, const ClassifyOptions& opts);

// Harmonic mean of two percentages; absent when both are zero.
std::optional<double> f1(double pr, double re);

struct MetricsReport {
  ConfusionCounts counts;
  EditCounts errors;
  long num_utterances = 0;
  std::optional<double> cd_precision, cd_recall, cd_f1;  // percent
  std::optional<double> md_precision, md_recall, md_f1;  // percent
  std::optional<double> dar;                             // percent
  std::optional<double> per;                             // percent
  std::optional<double> rtf;                             // plain ratio
  double decode_seconds_total = 0.0;
  double audio_seconds_total = 0.0;
};

// CD/MD precision-recall-F1 and DAR from raw counts; rates with a zero
// denominator are absent.
MetricsReport detection_rates(const ConfusionCounts& c);

// Corpus real-time factor.
double rtf(double decode_seconds_total, double audio_seconds_total);

struct ReportOptions {
  ClassifyOptions classify;
  // DAR over per-utterance ratios restricted to utterances containing at
  // least one true rejection, instead of pooling all positions.
  bool dar_per_utterance = false;
};

// Aggregates confusion and error counts over the corpus, then derives all
// rates. PER compares the hypothesis against the annotated transcription.
// RTF appears when every scored record carries decode and audio times.
MetricsReport report(std::span<const UtteranceRecord> corpus,
                     const ReportOptions& opts);

// Percentages with two decimals, half away from zero; absent rates as "--".
std::string render_report(const MetricsReport& r);

}  // namespace mdd

#endif  // MDD_EVAL_H_
