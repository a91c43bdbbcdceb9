// src/cli.cc

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

#include "mdd/cli.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "mdd/autodiff.h"
#include "mdd/ctc.h"
#include "mdd/eval.h"
#include "mdd/io.h"
#include "mdd/maskctc.h"
#include "mdd/phone_inventory.h"
#include "mdd/pronunciation.h"
#include "mdd/rng.h"
#include "mdd/synth.h"

namespace mdd {

namespace {

using ordered_json = nlohmann::ordered_json;

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  require(out.good(), str_cat("cannot write ", out_path));
  out << content;
  require(out.good(), str_cat("write failed for ", out_path));
}

std::string file_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

std::vector<std::vector<std::string>> load_prompts(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), str_cat("cannot open prompts file ", path));
  std::vector<std::vector<std::string>> prompts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> symbols;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) symbols.push_back(tok);
    require(!symbols.empty(), str_cat(path, ":", lineno, ": empty prompt"));
    prompts.push_back(std::move(symbols));
  }
  require(!prompts.empty(), str_cat(path, ": no prompts"));
  return prompts;
}

// One dictation output entry (the `dictate` JSONL schema).
struct DictationEntry {
  std::string utt_id;
  std::vector<std::string> hypothesis;
  std::vector<double> confidences;
  std::vector<int> masked_positions;
  std::vector<RefineStep> trace;
  double decode_seconds = -1.0;  // < 0 suppressed
};

std::string dictation_line(const DictationEntry& e) {
  ordered_json j;
  j["utt_id"] = e.utt_id;
  j["hypothesis"] = e.hypothesis;
  j["confidences"] = e.confidences;
  j["masked_positions"] = e.masked_positions;
  ordered_json iters = ordered_json::array();
  for (const RefineStep& s : e.trace) {
    ordered_json it;
    it["masked"] = s.masked_positions;
    it["filled"] = s.filled_positions;
    iters.push_back(std::move(it));
  }
  j["iterations"] = std::move(iters);
  if (e.decode_seconds >= 0) j["decode_seconds"] = e.decode_seconds;
  return j.dump();
}

std::map<std::string, DictationEntry> load_dictation(const std::string& path,
                                                     const PhoneInventory& inv) {
  std::ifstream in(path);
  require(in.good(), str_cat("cannot open dictation file ", path));
  std::map<std::string, DictationEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string where = str_cat(path, ":", lineno);
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      fail(str_cat(where, ": malformed JSON: ", ex.what()));
    }
    DictationEntry e;
    require(j.contains("utt_id") && j.contains("hypothesis") &&
                j.contains("confidences"),
            str_cat(where, ": dictation entries need utt_id/hypothesis/confidences"));
    e.utt_id = j.at("utt_id").get<std::string>();
    for (const auto& s : j.at("hypothesis")) {
      std::string sym = s.get<std::string>();
      require(inv.find(sym) >= 0, str_cat(where, ": unknown symbol '", sym, "'"));
      e.hypothesis.push_back(std::move(sym));
    }
    e.confidences = j.at("confidences").get<std::vector<double>>();
    require(e.confidences.size() == e.hypothesis.size(),
            str_cat(where, ": confidences not aligned to hypothesis"));
    if (j.contains("decode_seconds"))
      e.decode_seconds = j.at("decode_seconds").get<double>();
    require(entries.emplace(e.utt_id, e).second,
            str_cat(where, ": duplicate utt_id '", e.utt_id, "'"));
  }
  return entries;
}

// ---------------------------------------------------------------- synth ---

struct SynthArgs {
  std::string inventory, prompts, out;
  SynthSpec spec;
};

int cmd_synth(const SynthArgs& a) {
  PhoneInventory inv = PhoneInventory::load(a.inventory);
  auto prompts = load_prompts(a.prompts);
  std::vector<UtteranceRecord> corpus = synth_corpus(inv, prompts, a.spec);
  std::string out;
  for (const UtteranceRecord& rec : corpus) {
    out += corpus_line(rec);
    out += '\n';
  }
  write_output(a.out, out);
  return 0;
}

// ----------------------------------------------------------- init-model ---

struct InitModelArgs {
  std::string inventory, out;
  uint64_t seed = 1;
  EncoderConfig enc;
  CmlmConfig cmlm;
  PmConfig pm;
};

int cmd_init_model(InitModelArgs a) {
  PhoneInventory inv = PhoneInventory::load(a.inventory);
  a.enc.vocab = inv.size();
  a.cmlm.vocab = inv.size();
  a.pm.vocab = inv.size();
  // The CMLM cross-attends over the encoder memory, so width, heads and
  // feed-forward size are shared; only the block counts differ.
  a.cmlm.d_model = a.enc.d_model;
  a.cmlm.n_heads = a.enc.n_heads;
  a.cmlm.d_ff = a.enc.d_ff;
  Rng rng(a.seed);
  ModelFile models;
  models.encoder = EncoderStack::create(a.enc, rng);
  models.cmlm = Cmlm::create(a.cmlm, rng);
  models.pm = PmWeights::create(a.pm, rng);
  require(!a.out.empty(), "init-model needs --out");
  save_models(a.out, models);
  return 0;
}

// --------------------------------------------------------------- dictate ---

struct DictateArgs {
  std::string weights, inventory, out;
  std::vector<std::string> features, posteriors, memory;
  MaskCtcConfig cfg;
  std::string conf_mode = "max";
  bool no_timing = false;
  int threads = 1;
};

int cmd_dictate(DictateArgs a) {
  a.cfg.conf_mode = parse_confidence_mode(a.conf_mode);
  a.cfg.validate();
  require(a.threads >= 1, "--threads must be >= 1");
  require(a.features.empty() != a.posteriors.empty(),
          "dictate needs either --features or --posteriors inputs");
  require(a.memory.empty() || a.memory.size() == a.posteriors.size(),
          "--memory files must pair up with --posteriors files");

  PhoneInventory inv = PhoneInventory::load(a.inventory);
  ModelFile models = load_models(a.weights);
  require(models.cmlm.has_value(), str_cat(a.weights, " holds no CMLM weights"));
  const Cmlm& cmlm = *models.cmlm;
  bool from_features = !a.features.empty();
  if (from_features)
    require(models.encoder.has_value(),
            str_cat(a.weights, " holds no encoder weights"));

  const std::vector<std::string>& inputs = from_features ? a.features : a.posteriors;
  std::vector<DictationEntry> entries(inputs.size());

  auto decode_one = [&](size_t i) {
    DictationResult res;
    if (from_features) {
      Matrix feats = read_matrix(inputs[i]);
      res = dictate(feats, *models.encoder, cmlm, a.cfg);
    } else {
      PosteriorGrid grid = PosteriorGrid::from_single_precision(read_matrix(inputs[i]));
      require(grid.vocab() == inv.size(),
              str_cat(inputs[i], ": grid vocabulary ", grid.vocab(),
                      " != inventory size ", inv.size()));
      Matrix mem = a.memory.empty()
                       ? Matrix(grid.frames(), cmlm.cfg.d_model)
                       : read_matrix(a.memory[i]);
      res = dictate_from_grid(grid, mem, cmlm, a.cfg);
    }
    DictationEntry& e = entries[i];
    e.utt_id = file_stem(inputs[i]);
    e.hypothesis = inv.decode(res.tokens);
    e.confidences = res.confidences;
    for (const RefineStep& s : res.trace)
      e.masked_positions.insert(e.masked_positions.end(),
                                s.filled_positions.begin(),
                                s.filled_positions.end());
    std::sort(e.masked_positions.begin(), e.masked_positions.end());
    e.trace = res.trace;
    e.decode_seconds = a.no_timing ? -1.0 : res.decode_seconds;
  };

  if (a.threads == 1) {
    for (size_t i = 0; i < inputs.size(); ++i) decode_one(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < a.threads; ++w)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < inputs.size();
             i = next.fetch_add(1))
          decode_one(i);
      });
    for (std::thread& th : pool) th.join();
  }

  std::string out;
  for (const DictationEntry& e : entries) {
    out += dictation_line(e);
    out += '\n';
  }
  write_output(a.out, out);
  return 0;
}

// ----------------------------------------------------------------- judge ---

struct JudgeArgs {
  std::string weights, inventory, corpus, dictation, out, out_dictation;
};

int cmd_judge(const JudgeArgs& a) {
  PhoneInventory inv = PhoneInventory::load(a.inventory);
  ModelFile models = load_models(a.weights);
  require(models.pm.has_value(),
          str_cat(a.weights, " holds no pronunciation model weights"));
  const PmWeights& pm = *models.pm;

  std::vector<UtteranceRecord> corpus = load_corpus(a.corpus, inv);
  std::map<std::string, DictationEntry> dictation;
  if (!a.dictation.empty()) dictation = load_dictation(a.dictation, inv);

  std::string out, out_dict;
  for (UtteranceRecord& rec : corpus) {
    std::vector<double> confidences;
    double decode_seconds = -1.0;
    if (!a.dictation.empty()) {
      auto it = dictation.find(rec.utt_id);
      require(it != dictation.end(),
              str_cat("no dictation entry for utterance '", rec.utt_id, "'"));
      rec.hypothesis = it->second.hypothesis;
      rec.has_hypothesis = true;
      confidences = it->second.confidences;
      decode_seconds = it->second.decode_seconds;
    } else {
      require(rec.has_hypothesis,
              str_cat(rec.utt_id,
                      ": record has no hypothesis and no --dictation given"));
      confidences.assign(rec.hypothesis.size(), 1.0);
    }

    rec.judgements.clear();
    rec.has_judgements = true;
    double pm_seconds = 0.0;
    if (!rec.hypothesis.empty()) {
      PmInput input;
      input.dictated = inv.encode(rec.hypothesis);
      input.confidences = confidences;
      input.prompt = inv.encode(rec.canonical);
      auto t0 = std::chrono::steady_clock::now();
      rec.judgements = pm_forward(input, pm);
      pm_seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    }
    out += corpus_line(rec);
    out += '\n';

    if (!a.out_dictation.empty()) {
      auto it = dictation.find(rec.utt_id);
      require(it != dictation.end(),
              "--out-dictation requires --dictation entries for every record");
      DictationEntry e = it->second;
      if (e.decode_seconds >= 0) e.decode_seconds += pm_seconds;
      out_dict += dictation_line(e);
      out_dict += '\n';
    }
  }
  write_output(a.out, out);
  if (!a.out_dictation.empty()) write_output(a.out_dictation, out_dict);
  return 0;
}

// -------------------------------------------------------------- evaluate ---

struct EvaluateArgs {
  std::string corpus, inventory, fold, dictation, out, json_out;
  std::string hyp_source = "hypothesis";
  std::string anti_mode = "per-phone";
  ReportOptions opts;
};

ordered_json rate_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

std::string report_json(const MetricsReport& r) {
  ordered_json j;
  j["counts"] = {{"TA", r.counts.ta}, {"FR", r.counts.fr}, {"FA", r.counts.fa},
                 {"TR", r.counts.tr}, {"CD", r.counts.cd}, {"ID", r.counts.id}};
  j["errors"] = {{"sub", r.errors.subs},
                 {"ins", r.errors.ins},
                 {"del", r.errors.dels},
                 {"ref_len", r.errors.ref_len}};
  j["utterances"] = r.num_utterances;
  ordered_json rates;
  rates["cd_precision"] = rate_json(r.cd_precision);
  rates["cd_recall"] = rate_json(r.cd_recall);
  rates["cd_f1"] = rate_json(r.cd_f1);
  rates["md_precision"] = rate_json(r.md_precision);
  rates["md_recall"] = rate_json(r.md_recall);
  rates["md_f1"] = rate_json(r.md_f1);
  rates["dar"] = rate_json(r.dar);
  rates["per"] = rate_json(r.per);
  rates["rtf"] = rate_json(r.rtf);
  j["rates"] = std::move(rates);
  if (r.rtf) {
    j["decode_seconds_total"] = r.decode_seconds_total;
    j["audio_seconds_total"] = r.audio_seconds_total;
  }
  return j.dump(2) + "\n";
}

int cmd_evaluate(const EvaluateArgs& a) {
  PhoneInventory inv = PhoneInventory::load(a.inventory);
  std::vector<UtteranceRecord> corpus = load_corpus(a.corpus, inv);
  require(!corpus.empty(), str_cat(a.corpus, ": empty corpus"));

  AntiFoldMode anti_mode;
  if (a.anti_mode == "per-phone") {
    anti_mode = AntiFoldMode::kPerPhone;
  } else if (a.anti_mode == "single") {
    anti_mode = AntiFoldMode::kSingleLabel;
  } else {
    fail(str_cat("unknown --anti-mode '", a.anti_mode, "' (per-phone|single)"));
  }

  if (!a.dictation.empty()) {
    std::map<std::string, DictationEntry> dictation =
        load_dictation(a.dictation, inv);
    for (UtteranceRecord& rec : corpus) {
      auto it = dictation.find(rec.utt_id);
      require(it != dictation.end(),
              str_cat("no dictation entry for utterance '", rec.utt_id, "'"));
      rec.hypothesis = it->second.hypothesis;
      rec.has_hypothesis = true;
      rec.decode_seconds = it->second.decode_seconds;
    }
  }

  for (UtteranceRecord& rec : corpus) {
    if (a.hyp_source == "annotated") {
      rec.hypothesis = rec.annotated;
      rec.has_hypothesis = true;
    } else if (a.hyp_source == "canonical") {
      rec.hypothesis = rec.canonical;
      rec.has_hypothesis = true;
    } else {
      require(a.hyp_source == "hypothesis",
              str_cat("unknown --hyp-source '", a.hyp_source,
                      "' (hypothesis|annotated|canonical)"));
    }
    require(rec.has_hypothesis,
            str_cat(rec.utt_id, ": record has no hypothesis to evaluate"));
  }

  if (!a.fold.empty()) {
    FoldingMap fold_map = FoldingMap::load(a.fold);
    fold_map.validate_against(inv);
    for (UtteranceRecord& rec : corpus) {
      rec.canonical = fold_map.fold(rec.canonical, anti_mode);
      rec.annotated = fold_map.fold(rec.annotated, anti_mode);
      rec.hypothesis = fold_map.fold(rec.hypothesis, anti_mode);
    }
  }

  MetricsReport r = report(corpus, a.opts);
  write_output(a.out, render_report(r));
  if (!a.json_out.empty()) write_output(a.json_out, report_json(r));
  return 0;
}

// ----------------------------------------------------------------- bench ---

struct BenchArgs {
  std::string corpus, inventory, dictation, out;
};

int cmd_bench(const BenchArgs& a) {
  PhoneInventory inv = PhoneInventory::load(a.inventory);
  std::vector<UtteranceRecord> corpus = load_corpus(a.corpus, inv);
  require(!corpus.empty(), str_cat(a.corpus, ": empty corpus"));
  std::map<std::string, DictationEntry> dictation =
      load_dictation(a.dictation, inv);

  std::string out = "utt_id  audio_s  decode_s  rtf\n";
  double audio_total = 0.0, decode_total = 0.0;
  for (const UtteranceRecord& rec : corpus) {
    auto it = dictation.find(rec.utt_id);
    require(it != dictation.end(),
            str_cat("no dictation entry for utterance '", rec.utt_id, "'"));
    require(rec.duration_seconds > 0,
            str_cat(rec.utt_id, ": missing duration_seconds"));
    require(it->second.decode_seconds >= 0,
            str_cat(rec.utt_id, ": dictation entry has no decode_seconds"));
    double d = it->second.decode_seconds;
    audio_total += rec.duration_seconds;
    decode_total += d;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s  %.3f  %.6f  %.4f\n",
                  rec.utt_id.c_str(), rec.duration_seconds, d,
                  d / rec.duration_seconds);
    out += buf;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "TOTAL  %.3f  %.6f  %.4f\n", audio_total,
                decode_total, rtf(decode_total, audio_total));
  out += buf;
  write_output(a.out, out);
  return 0;
}

// ------------------------------------------------------------- gradcheck ---

struct GradcheckArgs {
  std::string weights, out;
  uint64_t seed = 7;
  int samples = 25;
};

// Spot-check: full analytic backward once, central differences on a seeded
// random subset of elements per tensor.
double gradcheck_sampled(const nn::LossFn& loss_fn,
                         const std::vector<nn::ParamRef>& params, double eps,
                         int samples_per_tensor, Rng& rng) {
  nn::Tape tape;
  nn::Var loss = loss_fn(tape);
  tape.backward(loss);
  std::vector<Matrix> analytic;
  for (const nn::ParamRef& p : params) {
    const Matrix* g = tape.grad_of(*p.value);
    analytic.push_back(g ? *g : Matrix(p.value->rows(), p.value->cols()));
  }

  double max_rel = 0.0;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    Matrix& m = *params[pi].value;
    int64_t n = m.size();
    int64_t take = std::min<int64_t>(n, samples_per_tensor);
    for (int64_t s = 0; s < take; ++s) {
      int64_t i = take == n ? s : static_cast<int64_t>(rng.bounded(n));
      double orig = m.data()[i];
      m.data()[i] = orig + eps;
      nn::Tape tp;
      double fp = tp.scalar(loss_fn(tp));
      m.data()[i] = orig - eps;
      nn::Tape tm;
      double fm = tm.scalar(loss_fn(tm));
      m.data()[i] = orig;
      double numeric = (fp - fm) / (2.0 * eps);
      double ana = analytic[pi].data()[i];
      double denom = std::max({1.0, std::abs(ana), std::abs(numeric)});
      max_rel = std::max(max_rel, std::abs(ana - numeric) / denom);
    }
  }
  return max_rel;
}

int cmd_gradcheck(const GradcheckArgs& a) {
  ModelFile models = load_models(a.weights);
  Rng rng(a.seed);
  std::string out;
  bool all_ok = true;

  auto run = [&](const std::string& name, const nn::LossFn& fn,
                 std::vector<nn::ParamRef> params) {
    double err = gradcheck_sampled(fn, params, 1e-5, a.samples, rng);
    bool ok = err < 1e-6;
    all_ok = all_ok && ok;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-22s max_rel_err=%.3e  %s\n", name.c_str(),
                  err, ok ? "ok" : "FAIL");
    out += buf;
  };

  auto collect = [](auto& network, const std::string& prefix) {
    std::vector<nn::ParamRef> params;
    network.visit_params(prefix, [&](const std::string& name, Matrix& m) {
      params.push_back(nn::ParamRef{name, &m});
    });
    return params;
  };

  if (models.pm) {
    PmWeights& pm = *models.pm;
    int vocab = pm.cfg.vocab;
    PmInput input;
    int S = 3, L = 4;
    for (int i = 0; i < S; ++i) {
      input.dictated.push_back(2 + static_cast<int>(rng.bounded(vocab - 2)));
      input.confidences.push_back(rng.uniform());
    }
    for (int i = 0; i < L; ++i)
      input.prompt.push_back(2 + static_cast<int>(rng.bounded(vocab - 2)));
    std::vector<int> labels;
    for (int i = 0; i < S; ++i)
      labels.push_back(static_cast<int>(rng.bounded(2)));
    run("pm.crossentropy",
        [&](nn::Tape& t) { return pm_crossentropy(t, input, pm, labels); },
        collect(pm, "pm"));
  }
  if (models.cmlm) {
    Cmlm& cmlm = *models.cmlm;
    int vocab = cmlm.cfg.vocab;
    int S = 4, T = 5;
    Matrix memory(T, cmlm.cfg.d_model);
    nn::fill_uniform(memory, rng, 0.5);
    std::vector<int> tokens, reference;
    for (int i = 0; i < S; ++i) {
      int tok = 2 + static_cast<int>(rng.bounded(vocab - 2));
      reference.push_back(tok);
      tokens.push_back(i % 2 == 0 ? kMaskToken : tok);
    }
    run("cmlm.masked_ce",
        [&](nn::Tape& t) {
          return cmlm_masked_crossentropy(t, cmlm, tokens, t.leaf(memory),
                                          reference);
        },
        collect(cmlm, "cmlm"));
  }
  if (models.encoder) {
    EncoderStack& enc = *models.encoder;
    Matrix feats(4, enc.cfg.d_feat);
    nn::fill_uniform(feats, rng, 0.5);
    run("encoder.logprob_sum",
        [&](nn::Tape& t) {
          nn::Var x = enc.in_proj.forward(t, t.leaf(feats));
          x = t.add(x, t.constant(nn::sinusoidal_positions(feats.rows(),
                                                           enc.cfg.d_model)));
          for (const nn::TransformerBlock& b : enc.blocks)
            x = b.forward(t, x, nullptr);
          return t.reduce_sum(t.log_softmax_rows(enc.head.forward(t, x)));
        },
        collect(enc, "enc"));
  }

  write_output(a.out, out);
  return all_ok ? 0 : 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Non-autoregressive mispronunciation detection and diagnosis engine"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a synthetic L2-error corpus from prompts");
  synth->add_option("--inventory", synth_args.inventory)->required();
  synth->add_option("--prompts", synth_args.prompts, "one prompt per line")
      ->required();
  synth->add_option("--seed", synth_args.spec.seed);
  synth->add_option("--p-sub", synth_args.spec.p_sub)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--p-del", synth_args.spec.p_del)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--p-ins", synth_args.spec.p_ins)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--p-anti", synth_args.spec.p_anti)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--seconds-per-phone", synth_args.spec.seconds_per_phone);
  synth->add_option("--out", synth_args.out);

  InitModelArgs init_args;
  CLI::App* init = app.add_subcommand(
      "init-model", "Write seeded dictation + pronunciation model weights");
  init->add_option("--inventory", init_args.inventory)->required();
  init->add_option("--seed", init_args.seed);
  init->add_option("--out", init_args.out)->required();
  init->add_option("--d-feat", init_args.enc.d_feat);
  init->add_option("--d-model", init_args.enc.d_model);
  init->add_option("--enc-blocks", init_args.enc.n_blocks);
  init->add_option("--cmlm-blocks", init_args.cmlm.n_blocks);
  init->add_option("--heads", init_args.enc.n_heads);
  init->add_option("--d-ff", init_args.enc.d_ff);
  init->add_option("--pm-d-e", init_args.pm.d_e);
  init->add_option("--pm-d-h", init_args.pm.d_h);
  init->add_option("--pm-d-a", init_args.pm.d_a);
  init->add_option("--pm-d-f", init_args.pm.d_f);
  init->add_option("--pm-blocks", init_args.pm.n_blocks);
  init->add_option("--pm-heads", init_args.pm.n_heads);
  init->add_option("--pm-gru", init_args.pm.n_gru);

  DictateArgs dict_args;
  CLI::App* dict = app.add_subcommand(
      "dictate", "Decode phone sequences with the Mask-CTC dictation model");
  dict->add_option("--weights", dict_args.weights)->required();
  dict->add_option("--inventory", dict_args.inventory)->required();
  dict->add_option("--features", dict_args.features, "MATX feature files");
  dict->add_option("--posteriors", dict_args.posteriors,
                   "MATX posterior grids (encoder bypassed)");
  dict->add_option("--memory", dict_args.memory,
                   "MATX memory matrices paired with --posteriors");
  dict->add_option("--p-thr", dict_args.cfg.p_thr)->check(CLI::Range(0.0, 1.0));
  dict->add_option("--iters", dict_args.cfg.iters)->check(CLI::PositiveNumber);
  dict->add_option("--conf-mode", dict_args.conf_mode, "max|mean|product");
  dict->add_flag("--no-timing", dict_args.no_timing);
  dict->add_option("--threads", dict_args.threads)->check(CLI::PositiveNumber);
  dict->add_option("--out", dict_args.out);

  JudgeArgs judge_args;
  CLI::App* judge = app.add_subcommand(
      "judge", "Run the pronunciation model over dictated phones");
  judge->add_option("--weights", judge_args.weights)->required();
  judge->add_option("--inventory", judge_args.inventory)->required();
  judge->add_option("--corpus", judge_args.corpus)->required();
  judge->add_option("--dictation", judge_args.dictation,
                    "dictate output supplying hypothesis + confidences");
  judge->add_option("--out", judge_args.out);
  judge->add_option("--out-dictation", judge_args.out_dictation,
                    "rewrite dictation entries with PM time included");

  EvaluateArgs eval_args;
  CLI::App* eval = app.add_subcommand(
      "evaluate", "Score a corpus: detection rates, DAR, PER, RTF");
  eval->add_option("--corpus", eval_args.corpus)->required();
  eval->add_option("--inventory", eval_args.inventory)->required();
  eval->add_option("--fold", eval_args.fold, "folding map TSV");
  eval->add_option("--anti-mode", eval_args.anti_mode, "per-phone|single");
  eval->add_option("--dictation", eval_args.dictation);
  eval->add_option("--hyp-source", eval_args.hyp_source,
                   "hypothesis|annotated|canonical");
  eval->add_flag("--use-judgements", eval_args.opts.classify.use_judgements);
  eval->add_flag("--skip-dels", eval_args.opts.classify.skip_dels);
  eval->add_flag("--dar-per-utt", eval_args.opts.dar_per_utterance);
  eval->add_option("--out", eval_args.out);
  eval->add_option("--json", eval_args.json_out);

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand(
      "bench", "Real-time-factor table from dictation timings");
  bench->add_option("--corpus", bench_args.corpus)->required();
  bench->add_option("--inventory", bench_args.inventory)->required();
  bench->add_option("--dictation", bench_args.dictation)->required();
  bench->add_option("--out", bench_args.out);

  GradcheckArgs gc_args;
  CLI::App* gc = app.add_subcommand(
      "gradcheck", "Verify analytic gradients against central differences");
  gc->add_option("--weights", gc_args.weights)->required();
  gc->add_option("--seed", gc_args.seed);
  gc->add_option("--samples", gc_args.samples)->check(CLI::PositiveNumber);
  gc->add_option("--out", gc_args.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth) return cmd_synth(synth_args);
    if (*init) return cmd_init_model(init_args);
    if (*dict) return cmd_dictate(dict_args);
    if (*judge) return cmd_judge(judge_args);
    if (*eval) return cmd_evaluate(eval_args);
    if (*bench) return cmd_bench(bench_args);
    if (*gc) return cmd_gradcheck(gc_args);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace mdd
