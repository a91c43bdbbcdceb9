// tests/test_eval.cc

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

#include <chrono>
#include <thread>

#include "mdd/rng.h"
#include "test_util.h"

namespace mdd {

namespace {

using Sym = std::vector<std::string>;

// Exhaustive minimum over all monotone alignments, written independently of
// the DP implementation.
int exhaustive_cost(const Sym& ref, const Sym& hyp, size_t i, size_t j) {
  if (i == ref.size()) return static_cast<int>(hyp.size() - j);
  if (j == hyp.size()) return static_cast<int>(ref.size() - i);
  int diag = exhaustive_cost(ref, hyp, i + 1, j + 1) + (ref[i] == hyp[j] ? 0 : 1);
  int del = exhaustive_cost(ref, hyp, i + 1, j) + 1;
  int ins = exhaustive_cost(ref, hyp, i, j + 1) + 1;
  return std::min({diag, del, ins});
}

int align_cost(const Sym& ref, const Sym& hyp) {
  return static_cast<int>(edit_counts(align(ref, hyp), ref.size()).errors());
}

UtteranceRecord make_record(Sym canonical, Sym annotated, Sym hypothesis) {
  UtteranceRecord rec;
  rec.utt_id = "u";
  rec.canonical = std::move(canonical);
  rec.annotated = std::move(annotated);
  rec.hypothesis = std::move(hypothesis);
  rec.has_hypothesis = true;
  return rec;
}

}  // namespace

void test_align_basics() {
  std::vector<AlignmentOp> ops = align(Sym{"a", "b", "c"}, Sym{"a", "b", "c"});
  CHECK_EQ(ops.size(), 3);
  for (const AlignmentOp& op : ops) CHECK(op.kind == EditKind::kMatch);

  ops = align(Sym{"a", "b", "c"}, Sym{"a", "c"});
  CHECK_EQ(ops.size(), 3);
  CHECK(ops[0].kind == EditKind::kMatch);
  CHECK(ops[1].kind == EditKind::kDelete);
  CHECK_EQ(ops[1].ref_index, 1);
  CHECK(ops[2].kind == EditKind::kMatch);
  CHECK_EQ(ops[2].hyp_index, 1);

  // Empty hypothesis: all deletions.
  ops = align(Sym{"a", "b"}, Sym{});
  CHECK_EQ(ops.size(), 2);
  for (const AlignmentOp& op : ops) CHECK(op.kind == EditKind::kDelete);
  CHECK_THROWS(align(Sym{}, Sym{"a"}));
}

void test_align_exhaustive_oracle() {
  Rng rng(3);
  const char* alphabet[] = {"a", "b", "c"};
  for (int trial = 0; trial < 300; ++trial) {
    Sym ref, hyp;
    int rl = 1 + static_cast<int>(rng.bounded(6));
    int hl = static_cast<int>(rng.bounded(7));
    for (int i = 0; i < rl; ++i) ref.push_back(alphabet[rng.bounded(3)]);
    for (int j = 0; j < hl; ++j) hyp.push_back(alphabet[rng.bounded(3)]);
    CHECK_EQ(align_cost(ref, hyp), exhaustive_cost(ref, hyp, 0, 0));
  }
}

void test_align_deterministic_and_symmetric() {
  Rng rng(5);
  const char* alphabet[] = {"x", "y", "z"};
  for (int trial = 0; trial < 100; ++trial) {
    Sym ref, hyp;
    int rl = 1 + static_cast<int>(rng.bounded(5));
    int hl = 1 + static_cast<int>(rng.bounded(5));
    for (int i = 0; i < rl; ++i) ref.push_back(alphabet[rng.bounded(3)]);
    for (int j = 0; j < hl; ++j) hyp.push_back(alphabet[rng.bounded(3)]);

    std::vector<AlignmentOp> a = align(ref, hyp);
    std::vector<AlignmentOp> b = align(ref, hyp);
    CHECK_EQ(a.size(), b.size());
    for (size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].kind == b[k].kind);
      CHECK_EQ(a[k].ref_index, b[k].ref_index);
      CHECK_EQ(a[k].hyp_index, b[k].hyp_index);
    }
    CHECK_EQ(align_cost(ref, hyp), align_cost(hyp, ref));
  }
}

void test_per_cases() {
  CHECK_NEAR(per(Sym{"a", "b", "c"}, Sym{"a", "b", "c"}), 0.0, 0.0);
  CHECK_NEAR(per(Sym{"a", "b", "c"}, Sym{"a", "c"}), 1.0 / 3.0, 1e-15);
  CHECK_NEAR(per(Sym{"a", "b", "c"}, Sym{"a", "b", "c", "d"}), 1.0 / 3.0, 1e-15);
}

void test_per_fold_invariance() {
  // An injective relabeling of both sequences leaves the rate unchanged.
  Rng rng(7);
  const char* alphabet[] = {"ax", "ix", "uw"};
  const char* relabeled[] = {"ah", "ih", "uw"};
  for (int trial = 0; trial < 50; ++trial) {
    Sym ref, hyp, ref2, hyp2;
    int rl = 1 + static_cast<int>(rng.bounded(5));
    int hl = static_cast<int>(rng.bounded(6));
    for (int i = 0; i < rl; ++i) {
      uint64_t k = rng.bounded(3);
      ref.push_back(alphabet[k]);
      ref2.push_back(relabeled[k]);
    }
    for (int j = 0; j < hl; ++j) {
      uint64_t k = rng.bounded(3);
      hyp.push_back(alphabet[k]);
      hyp2.push_back(relabeled[k]);
    }
    CHECK_NEAR(per(ref, hyp), per(ref2, hyp2), 0.0);
  }
}

void test_classify_hand_traced() {
  // Substitution dictated exactly as annotated: a true rejection with a
  // correct diagnosis.
  ConfusionCounts c = classify(
      make_record({"aa", "b", "k"}, {"aa", "d", "k"}, {"aa", "d", "k"}), {});
  CHECK_EQ(c.ta, 2);
  CHECK_EQ(c.fr, 0);
  CHECK_EQ(c.fa, 0);
  CHECK_EQ(c.tr, 1);
  CHECK_EQ(c.cd, 1);
  CHECK_EQ(c.id, 0);

  // Perfect everything.
  c = classify(make_record({"aa", "b"}, {"aa", "b"}, {"aa", "b"}), {});
  CHECK_EQ(c.ta, 2);
  CHECK_EQ(c.fr + c.fa + c.tr, 0);

  // The system echoes the canonical phone and misses the mispronunciation.
  c = classify(make_record({"aa", "b"}, {"aa", "d"}, {"aa", "b"}), {});
  CHECK_EQ(c.ta, 1);
  CHECK_EQ(c.fa, 1);
  CHECK_EQ(c.tr, 0);

  // Wrong diagnosis: flagged, but the dictated phone is not what was said.
  c = classify(make_record({"aa", "b"}, {"aa", "d"}, {"aa", "k"}), {});
  CHECK_EQ(c.tr, 1);
  CHECK_EQ(c.cd, 0);
  CHECK_EQ(c.id, 1);

  // Anti-phone dictated where the annotation has it: correct diagnosis.
  c = classify(make_record({"aa", "b"}, {"aa", "b*"}, {"aa", "b*"}), {});
  CHECK_EQ(c.tr, 1);
  CHECK_EQ(c.cd, 1);

  // Deletion on both sides counts as a correctly diagnosed rejection.
  c = classify(make_record({"aa", "b", "k"}, {"aa", "k"}, {"aa", "k"}), {});
  CHECK_EQ(c.ta, 2);
  CHECK_EQ(c.tr, 1);
  CHECK_EQ(c.cd, 1);
  CHECK_EQ(c.id, 0);

  // System deletes a phone that was actually spoken correctly.
  c = classify(make_record({"aa", "b"}, {"aa", "b"}, {"aa"}), {});
  CHECK_EQ(c.ta, 1);
  CHECK_EQ(c.fr, 1);

  // Insertions in the hypothesis never enter the confusion counts.
  c = classify(make_record({"aa", "b"}, {"aa", "b"}, {"aa", "k", "b"}), {});
  CHECK_EQ(c.ta + c.fr + c.fa + c.tr, 2);
}

void test_classify_judgements() {
  // The model can only add flags on top of the sequence comparison.
  UtteranceRecord rec = make_record({"aa", "b"}, {"aa", "b"}, {"aa", "b"});
  rec.judgements = {Judgement{0, PronunciationLabel::kCorrect, 0.9},
                    Judgement{1, PronunciationLabel::kMispronounced, 0.8}};
  rec.has_judgements = true;
  ConfusionCounts c = classify(rec, ClassifyOptions{true, false});
  CHECK_EQ(c.ta, 1);
  CHECK_EQ(c.fr, 1);

  // Judgements requested but absent.
  UtteranceRecord bare = make_record({"aa"}, {"aa"}, {"aa"});
  CHECK_THROWS(classify(bare, ClassifyOptions{true, false}));

  // A flag on a truly mispronounced phone that the dictation echoed
  // canonically: true rejection, but no usable diagnosis.
  UtteranceRecord fa_rec = make_record({"aa", "b"}, {"aa", "d"}, {"aa", "b"});
  fa_rec.judgements = {Judgement{0, PronunciationLabel::kCorrect, 0.9},
                       Judgement{1, PronunciationLabel::kMispronounced, 0.7}};
  fa_rec.has_judgements = true;
  c = classify(fa_rec, ClassifyOptions{true, false});
  CHECK_EQ(c.tr, 1);
  CHECK_EQ(c.id, 1);
  CHECK_EQ(c.fa, 0);
}

void test_classify_skip_dels() {
  // Truth deletion and system deletion positions drop out of the counts.
  UtteranceRecord rec = make_record({"aa", "b", "k"}, {"aa", "k"}, {"aa", "b", "k"});
  ConfusionCounts c = classify(rec, ClassifyOptions{false, true});
  CHECK_EQ(c.ta + c.fr + c.fa + c.tr, 2);
  c = classify(rec, ClassifyOptions{false, false});
  CHECK_EQ(c.ta + c.fr + c.fa + c.tr, 3);
  CHECK_EQ(c.fa, 1);  // deleted in the annotation, echoed by the system
}

void test_f1_values() {
  // Published detection scores reproduce their harmonic means.
  CHECK_NEAR(*f1(46.99, 50.15), 48.52, 0.01);
  CHECK_NEAR(*f1(91.97, 90.98), 91.47, 0.01);
  CHECK_NEAR(*f1(75.0, 75.0), 75.0, 1e-12);
  CHECK(!f1(0.0, 0.0).has_value());
  CHECK_THROWS(f1(-1.0, 2.0));
}

void test_detection_rates() {
  ConfusionCounts c;
  c.ta = 2;
  c.tr = 1;
  c.cd = 1;
  MetricsReport r = detection_rates(c);
  CHECK_NEAR(*r.cd_precision, 100.0, 0.0);
  CHECK_NEAR(*r.cd_recall, 100.0, 0.0);
  CHECK_NEAR(*r.cd_f1, 100.0, 0.0);
  CHECK_NEAR(*r.md_precision, 100.0, 0.0);
  CHECK_NEAR(*r.md_recall, 100.0, 0.0);
  CHECK_NEAR(*r.md_f1, 100.0, 0.0);
  CHECK_NEAR(*r.dar, 100.0, 0.0);

  ConfusionCounts d;
  d.cd = 3;
  d.id = 1;
  d.tr = 4;
  CHECK_NEAR(*detection_rates(d).dar, 75.0, 0.0);

  ConfusionCounts z;
  z.fa = 3;
  MetricsReport zr = detection_rates(z);
  CHECK_NEAR(*zr.md_recall, 0.0, 0.0);  // tr = 0 with fa > 0
  CHECK(!zr.md_precision.has_value());  // no flags raised at all
  CHECK(!zr.dar.has_value());
}

void test_detection_rates_scale_invariant() {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    ConfusionCounts c;
    c.ta = 1 + static_cast<long>(rng.bounded(50));
    c.fr = static_cast<long>(rng.bounded(20));
    c.fa = static_cast<long>(rng.bounded(20));
    c.tr = 1 + static_cast<long>(rng.bounded(30));
    c.cd = static_cast<long>(rng.bounded(c.tr + 1));
    c.id = c.tr - c.cd;
    ConfusionCounts scaled;
    long k = 3;
    scaled.ta = c.ta * k;
    scaled.fr = c.fr * k;
    scaled.fa = c.fa * k;
    scaled.tr = c.tr * k;
    scaled.cd = c.cd * k;
    scaled.id = c.id * k;
    MetricsReport a = detection_rates(c);
    MetricsReport b = detection_rates(scaled);
    CHECK_NEAR(*a.md_precision, *b.md_precision, 1e-12);
    CHECK_NEAR(*a.md_recall, *b.md_recall, 1e-12);
    CHECK_NEAR(*a.cd_precision, *b.cd_precision, 1e-12);
    CHECK_NEAR(*a.cd_recall, *b.cd_recall, 1e-12);
  }
}

void test_rtf_values() {
  CHECK_NEAR(rtf(0.5, 10.0), 0.05, 1e-15);
  CHECK_NEAR(rtf(0.0, 4.0), 0.0, 0.0);
  CHECK_THROWS(rtf(1.0, 0.0));
}

void test_rtf_sleep_harness() {
  // Stub decoder sleeping duration/10; loading time stays outside the clock.
  std::vector<UtteranceRecord> corpus;
  double durations[] = {1.2, 1.5, 1.8};
  for (int i = 0; i < 3; ++i) {
    UtteranceRecord rec = make_record({"aa"}, {"aa"}, {"aa"});
    rec.utt_id = "u" + std::to_string(i);
    rec.duration_seconds = durations[i];
    std::this_thread::sleep_for(std::chrono::milliseconds(5));  // "loading"
    auto t0 = std::chrono::steady_clock::now();
    std::this_thread::sleep_for(
        std::chrono::duration<double>(durations[i] / 10.0));
    rec.decode_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    corpus.push_back(rec);
  }
  MetricsReport r = report(corpus, {});
  CHECK(r.rtf.has_value());
  CHECK(*r.rtf >= 0.095 && *r.rtf <= 0.105);
}

void test_report_perfect_and_partition() {
  std::vector<UtteranceRecord> corpus = {
      make_record({"aa", "b"}, {"aa", "b"}, {"aa", "b"})};
  MetricsReport r = report(corpus, {});
  CHECK_NEAR(*r.cd_precision, 100.0, 0.0);
  CHECK_NEAR(*r.cd_recall, 100.0, 0.0);
  CHECK(!r.md_precision.has_value());  // no mispronunciations anywhere
  CHECK_NEAR(*r.per, 0.0, 0.0);
  CHECK(!r.rtf.has_value());

  // TA+FR+FA+TR covers every canonical position; CD+ID == TR.
  Rng rng(13);
  const char* alphabet[] = {"aa", "b", "k", "d"};
  std::vector<UtteranceRecord> mixed;
  long canonical_positions = 0;
  for (int i = 0; i < 20; ++i) {
    Sym canonical, annotated, hypothesis;
    int n = 1 + static_cast<int>(rng.bounded(6));
    canonical_positions += n;
    for (int j = 0; j < n; ++j) canonical.push_back(alphabet[rng.bounded(4)]);
    for (int j = 0; j < n; ++j)
      if (rng.uniform() < 0.8) annotated.push_back(alphabet[rng.bounded(4)]);
    if (annotated.empty()) annotated.push_back(alphabet[0]);
    for (int j = 0; j < n; ++j)
      if (rng.uniform() < 0.8) hypothesis.push_back(alphabet[rng.bounded(4)]);
    UtteranceRecord rec = make_record(canonical, annotated, hypothesis);
    rec.utt_id = "m" + std::to_string(i);
    mixed.push_back(rec);
  }
  MetricsReport m = report(mixed, {});
  CHECK_EQ(m.counts.ta + m.counts.fr + m.counts.fa + m.counts.tr,
           canonical_positions);
  CHECK_EQ(m.counts.cd + m.counts.id, m.counts.tr);
}

void test_report_dar_per_utterance() {
  std::vector<UtteranceRecord> corpus = {
      // 2 TR, both correctly diagnosed.
      make_record({"aa", "b"}, {"k", "d"}, {"k", "d"}),
      // 1 TR, wrongly diagnosed.
      make_record({"aa", "b"}, {"aa", "d"}, {"aa", "k"}),
      // no TR at all.
      make_record({"aa"}, {"aa"}, {"aa"}),
  };
  ReportOptions pooled;
  MetricsReport pr = report(corpus, pooled);
  CHECK_NEAR(*pr.dar, 100.0 * 2.0 / 3.0, 1e-12);

  ReportOptions per_utt;
  per_utt.dar_per_utterance = true;
  MetricsReport ur = report(corpus, per_utt);
  CHECK_NEAR(*ur.dar, (100.0 + 0.0) / 2.0, 1e-12);
}

void test_render_report() {
  std::vector<UtteranceRecord> corpus = {
      make_record({"aa", "b", "k"}, {"aa", "d", "k"}, {"aa", "d", "k"})};
  std::string text = render_report(report(corpus, {}));
  CHECK(text.find("CD") != std::string::npos);
  CHECK(text.find("100.00") != std::string::npos);
  CHECK(text.find("TA=2") != std::string::npos);
  CHECK(text.find("PER") != std::string::npos);
}

}  // namespace mdd

int main() {
  using mdd::test::Case;
  return mdd::test::run({
      Case{"align_basics", mdd::test_align_basics},
      Case{"align_exhaustive_oracle", mdd::test_align_exhaustive_oracle},
      Case{"align_deterministic_and_symmetric",
           mdd::test_align_deterministic_and_symmetric},
      Case{"per_cases", mdd::test_per_cases},
      Case{"per_fold_invariance", mdd::test_per_fold_invariance},
      Case{"classify_hand_traced", mdd::test_classify_hand_traced},
      Case{"classify_judgements", mdd::test_classify_judgements},
      Case{"classify_skip_dels", mdd::test_classify_skip_dels},
      Case{"f1_values", mdd::test_f1_values},
      Case{"detection_rates", mdd::test_detection_rates},
      Case{"detection_rates_scale_invariant",
           mdd::test_detection_rates_scale_invariant},
      Case{"rtf_values", mdd::test_rtf_values},
      Case{"rtf_sleep_harness", mdd::test_rtf_sleep_harness},
      Case{"report_perfect_and_partition",
           mdd::test_report_perfect_and_partition},
      Case{"report_dar_per_utterance", mdd::test_report_dar_per_utterance},
      Case{"render_report", mdd::test_render_report},
  });
}
