// tests/test_io.cc

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

#include "mdd/io.h"

#include <fstream>

#include "mdd/rng.h"
#include "mdd/synth.h"
#include "test_util.h"

namespace mdd {

namespace {

using test::TempDir;

std::string slurp_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

PhoneInventory full_inventory() {
  return PhoneInventory::load(test::data_file("timit48.tsv"));
}

}  // namespace

void test_matx_roundtrip_bitwise() {
  TempDir tmp("matx");
  Rng rng(3);
  Matrix m(7, 3);
  nn::fill_uniform(m, rng, 2.0);
  write_matrix(tmp.path("a.matx"), m);
  Matrix back = read_matrix(tmp.path("a.matx"));
  write_matrix(tmp.path("b.matx"), back);
  CHECK(slurp_bytes(tmp.path("a.matx")) == slurp_bytes(tmp.path("b.matx")));
  CHECK_EQ(back.rows(), 7);
  CHECK_EQ(back.cols(), 3);
  // Values round-trip exactly at single precision.
  for (int64_t i = 0; i < m.size(); ++i)
    CHECK_NEAR(back.data()[i], static_cast<double>(static_cast<float>(m.data()[i])), 0.0);
}

void test_matx_edge_cases() {
  TempDir tmp("matx_edge");
  write_matrix(tmp.path("empty.matx"), Matrix(0, 0));
  Matrix empty = read_matrix(tmp.path("empty.matx"));
  CHECK_EQ(empty.rows(), 0);
  CHECK_EQ(empty.cols(), 0);

  write_bytes(tmp.path("bad.matx"), std::string("XTAM") + std::string(8, '\0'));
  CHECK_THROWS(read_matrix(tmp.path("bad.matx")));

  // Truncated payload.
  std::string good = slurp_bytes([&] {
    write_matrix(tmp.path("full.matx"), Matrix(2, 2, 1.0));
    return tmp.path("full.matx");
  }());
  write_bytes(tmp.path("trunc.matx"), good.substr(0, good.size() - 2));
  CHECK_THROWS(read_matrix(tmp.path("trunc.matx")));

  // Non-finite values are rejected on write.
  Matrix nan_m(1, 1);
  nan_m(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(write_matrix(tmp.path("nan.matx"), nan_m));
}

void test_nnwt_roundtrip() {
  TempDir tmp("nnwt");
  Rng rng(5);
  TensorFile file;
  Matrix w(4, 6);
  nn::fill_uniform(w, rng, 1.0);
  file.tensors.push_back(NamedTensor::from_matrix("layer.W", w));
  NamedTensor vec;
  vec.name = "layer.b";
  vec.dims = {6};
  for (int i = 0; i < 6; ++i) vec.values.push_back(0.25 * i);
  file.tensors.push_back(vec);

  write_tensors(tmp.path("w.nnwt"), file);
  TensorFile back = read_tensors(tmp.path("w.nnwt"));
  CHECK_EQ(back.tensors.size(), 2);
  CHECK(back.find("layer.W") != nullptr);
  CHECK(back.at("layer.b").as_matrix().rows() == 1);
  write_tensors(tmp.path("w2.nnwt"), back);
  CHECK(slurp_bytes(tmp.path("w.nnwt")) == slurp_bytes(tmp.path("w2.nnwt")));

  // Duplicate names are rejected.
  file.tensors.push_back(vec);
  write_tensors(tmp.path("dup.nnwt"), file);
  CHECK_THROWS(read_tensors(tmp.path("dup.nnwt")));
}

void test_model_container_roundtrip() {
  TempDir tmp("models");
  Rng rng(7);
  ModelFile models;
  EncoderConfig enc_cfg;
  enc_cfg.d_feat = 6;
  enc_cfg.d_model = 8;
  enc_cfg.n_blocks = 1;
  enc_cfg.n_heads = 2;
  enc_cfg.d_ff = 12;
  enc_cfg.vocab = 9;
  models.encoder = EncoderStack::create(enc_cfg, rng);
  CmlmConfig cmlm_cfg{9, 8, 1, 2, 12};
  models.cmlm = Cmlm::create(cmlm_cfg, rng);
  PmConfig pm_cfg{9, 5, 8, 6, 8, 1, 2, 1};
  models.pm = PmWeights::create(pm_cfg, rng);

  save_models(tmp.path("m.nnwt"), models);
  ModelFile back = load_models(tmp.path("m.nnwt"));
  CHECK(back.encoder.has_value());
  CHECK(back.cmlm.has_value());
  CHECK(back.pm.has_value());
  CHECK_EQ(back.pm->cfg.d_a, 6);

  // Same forward behaviour after the round trip (weights survive at single
  // precision, so re-saving is byte-identical).
  ModelFile again = back;
  save_models(tmp.path("m2.nnwt"), again);
  CHECK(slurp_bytes(tmp.path("m.nnwt")) == slurp_bytes(tmp.path("m2.nnwt")));
}

void test_corpus_load_and_errors() {
  TempDir tmp("corpus");
  PhoneInventory inv = full_inventory();
  {
    std::ofstream out(tmp.path("ok.jsonl"));
    out << R"({"utt_id":"u1","canonical":["aa","b"],"annotated":["aa","d"]})" << "\n";
    out << R"({"utt_id":"u2","canonical":["k"],"annotated":["k"],"hypothesis":["k"],"duration_seconds":1.5})" << "\n";
    out << R"({"utt_id":"u3","canonical":["sh"],"annotated":["sh*"],"judgements":[],"truth":["sub"]})" << "\n";
  }
  std::vector<UtteranceRecord> corpus = load_corpus(tmp.path("ok.jsonl"), inv);
  CHECK_EQ(corpus.size(), 3);
  CHECK(!corpus[0].has_hypothesis);
  CHECK(corpus[1].has_hypothesis);
  CHECK_NEAR(corpus[1].duration_seconds, 1.5, 0.0);
  CHECK(corpus[2].has_judgements);
  CHECK(corpus[2].truth == (std::vector<std::string>{"sub"}));

  {
    std::ofstream out(tmp.path("badsym.jsonl"));
    out << R"({"utt_id":"u1","canonical":["zz"],"annotated":["aa"]})" << "\n";
  }
  try {
    load_corpus(tmp.path("badsym.jsonl"), inv);
    CHECK(false);
  } catch (const DataError& e) {
    std::string msg = e.what();
    CHECK(msg.find(":1") != std::string::npos);    // line number
    CHECK(msg.find("zz") != std::string::npos);    // offending symbol
  }

  {
    std::ofstream out(tmp.path("badjson.jsonl"));
    out << "{not json}\n";
  }
  CHECK_THROWS(load_corpus(tmp.path("badjson.jsonl"), inv));

  {
    std::ofstream out(tmp.path("empty.jsonl"));
  }
  CHECK(load_corpus(tmp.path("empty.jsonl"), inv).empty());
}

void test_corpus_save_load_identity() {
  TempDir tmp("corpus_rt");
  PhoneInventory inv = full_inventory();
  SynthSpec spec;
  spec.p_sub = 0.3;
  spec.p_del = 0.1;
  spec.p_ins = 0.1;
  spec.p_anti = 0.5;
  spec.seed = 11;
  spec.seconds_per_phone = 0.08;
  std::vector<std::vector<std::string>> prompts = {
      {"aa", "b", "k", "sil"}, {"iy", "sh", "uw"}, {"dh", "ax", "m", "ae", "t"}};
  std::vector<UtteranceRecord> corpus = synth_corpus(inv, prompts, spec);
  save_corpus(tmp.path("c.jsonl"), corpus);
  std::vector<UtteranceRecord> back = load_corpus(tmp.path("c.jsonl"), inv);
  save_corpus(tmp.path("c2.jsonl"), back);
  CHECK(slurp_bytes(tmp.path("c.jsonl")) == slurp_bytes(tmp.path("c2.jsonl")));
}

void test_synth_rates_zero_and_one() {
  PhoneInventory inv = full_inventory();
  std::vector<std::vector<std::string>> prompts = {
      {"aa", "b", "k"}, {"iy", "sh", "uw", "dh"}};

  SynthSpec none;
  none.seed = 3;
  std::vector<UtteranceRecord> clean = synth_corpus(inv, prompts, none);
  for (size_t i = 0; i < prompts.size(); ++i) {
    CHECK(clean[i].annotated == prompts[i]);
    for (const std::string& t : clean[i].truth) CHECK_EQ(t, std::string("ok"));
  }

  SynthSpec all_sub;
  all_sub.p_sub = 1.0;
  all_sub.seed = 5;
  std::vector<UtteranceRecord> subbed = synth_corpus(inv, prompts, all_sub);
  for (size_t i = 0; i < prompts.size(); ++i) {
    CHECK_EQ(subbed[i].annotated.size(), prompts[i].size());
    for (size_t j = 0; j < prompts[i].size(); ++j) {
      CHECK(subbed[i].annotated[j] != prompts[i][j]);
      CHECK(!is_anti_symbol(subbed[i].annotated[j]));  // p_anti = 0
      CHECK_EQ(subbed[i].truth[j], std::string("sub"));
    }
  }

  SynthSpec anti;
  anti.p_sub = 1.0;
  anti.p_anti = 1.0;
  anti.seed = 5;
  for (const UtteranceRecord& rec : synth_corpus(inv, prompts, anti))
    for (size_t j = 0; j < rec.annotated.size(); ++j)
      CHECK(is_anti_symbol(rec.annotated[j]));

  SynthSpec bad;
  bad.p_sub = 0.7;
  bad.p_del = 0.5;
  CHECK_THROWS(synth_corpus(inv, prompts, bad));
}

void test_synth_determinism() {
  PhoneInventory inv = full_inventory();
  std::vector<std::vector<std::string>> prompts = {
      {"aa", "b", "k", "d", "iy"}, {"sh", "uw", "m", "n"}};
  SynthSpec spec;
  spec.p_sub = 0.4;
  spec.p_del = 0.2;
  spec.p_ins = 0.2;
  spec.p_anti = 0.3;
  spec.seed = 21;

  std::vector<UtteranceRecord> a = synth_corpus(inv, prompts, spec);
  std::vector<UtteranceRecord> b = synth_corpus(inv, prompts, spec);
  CHECK_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(corpus_line(a[i]) == corpus_line(b[i]));
  }

  // Different seeds give different corpora.
  spec.seed = 22;
  std::vector<UtteranceRecord> c = synth_corpus(inv, prompts, spec);
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!(a[i].annotated == c[i].annotated)) differs = true;
  CHECK(differs);
}

void test_synth_truth_matches_alignment() {
  // With p_ins = 0, the generative labels agree with the alignment-based
  // classification for this corpus.
  PhoneInventory inv = full_inventory();
  std::vector<std::vector<std::string>> prompts;
  std::vector<std::string> pool = {"aa", "iy", "sh", "k", "d", "m",
                                   "uw", "eh", "t", "n", "l", "r"};
  Rng prng(31);
  for (int i = 0; i < 12; ++i) {
    std::vector<std::string> p;
    int n = 4 + static_cast<int>(prng.bounded(6));
    for (int j = 0; j < n; ++j) p.push_back(pool[prng.bounded(pool.size())]);
    prompts.push_back(p);
  }
  SynthSpec spec;
  spec.p_sub = 0.15;
  spec.p_del = 0.05;
  spec.p_anti = 0.3;
  spec.seed = 9;

  for (const UtteranceRecord& rec : synth_corpus(inv, prompts, spec)) {
    UtteranceRecord scored = rec;
    scored.hypothesis = rec.annotated;
    scored.has_hypothesis = true;
    ConfusionCounts c = classify(scored, {});
    long truth_mis = 0;
    for (const std::string& t : rec.truth)
      if (t != "ok") ++truth_mis;
    CHECK_EQ(c.tr + c.fa, truth_mis);
    CHECK_EQ(c.ta + c.fr, static_cast<long>(rec.truth.size()) - truth_mis);
  }
}

}  // namespace mdd

int main() {
  using mdd::test::Case;
  return mdd::test::run({
      Case{"matx_roundtrip_bitwise", mdd::test_matx_roundtrip_bitwise},
      Case{"matx_edge_cases", mdd::test_matx_edge_cases},
      Case{"nnwt_roundtrip", mdd::test_nnwt_roundtrip},
      Case{"model_container_roundtrip", mdd::test_model_container_roundtrip},
      Case{"corpus_load_and_errors", mdd::test_corpus_load_and_errors},
      Case{"corpus_save_load_identity", mdd::test_corpus_save_load_identity},
      Case{"synth_rates_zero_and_one", mdd::test_synth_rates_zero_and_one},
      Case{"synth_determinism", mdd::test_synth_determinism},
      Case{"synth_truth_matches_alignment",
           mdd::test_synth_truth_matches_alignment},
  });
}
