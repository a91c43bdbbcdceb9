// python/bindings.cc

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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mdd/ctc.h"
#include "mdd/eval.h"
#include "mdd/io.h"
#include "mdd/maskctc.h"
#include "mdd/phone_inventory.h"
#include "mdd/pronunciation.h"
#include "mdd/rng.h"
#include "mdd/synth.h"

namespace py = pybind11;
using namespace mdd;

namespace {

Matrix matrix_from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  require(arr.ndim() == 2, "expected a 2-D array");
  Matrix m(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
  std::memcpy(m.data(), arr.data(), sizeof(double) * m.size());
  return m;
}

py::array_t<double> numpy_from_matrix(const Matrix& m) {
  py::array_t<double> arr({m.rows(), m.cols()});
  std::memcpy(arr.mutable_data(), m.data(), sizeof(double) * m.size());
  return arr;
}

PosteriorGrid grid_from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  return PosteriorGrid::validated(matrix_from_numpy(arr));
}

const char* edit_kind_name(EditKind k) {
  switch (k) {
    case EditKind::kMatch: return "match";
    case EditKind::kSubstitute: return "substitute";
    case EditKind::kInsert: return "insert";
    case EditKind::kDelete: return "delete";
  }
  return "?";
}

py::dict counts_dict(const ConfusionCounts& c) {
  py::dict d;
  d["TA"] = c.ta;
  d["FR"] = c.fr;
  d["FA"] = c.fa;
  d["TR"] = c.tr;
  d["CD"] = c.cd;
  d["ID"] = c.id;
  return d;
}

py::object opt(const std::optional<double>& v) {
  if (!v) return py::none();
  return py::float_(*v);
}

py::dict report_dict(const MetricsReport& r) {
  py::dict d;
  d["counts"] = counts_dict(r.counts);
  py::dict err;
  err["sub"] = r.errors.subs;
  err["ins"] = r.errors.ins;
  err["del"] = r.errors.dels;
  err["ref_len"] = r.errors.ref_len;
  d["errors"] = err;
  d["cd_precision"] = opt(r.cd_precision);
  d["cd_recall"] = opt(r.cd_recall);
  d["cd_f1"] = opt(r.cd_f1);
  d["md_precision"] = opt(r.md_precision);
  d["md_recall"] = opt(r.md_recall);
  d["md_f1"] = opt(r.md_f1);
  d["dar"] = opt(r.dar);
  d["per"] = opt(r.per);
  d["rtf"] = opt(r.rtf);
  return d;
}

// Bundle of the three networks, mirroring the NNWT model container.
struct PyModels {
  ModelFile models;

  static PyModels load(const std::string& path) { return PyModels{load_models(path)}; }

  static PyModels init(int vocab, uint64_t seed, int d_feat, int d_model,
                       int enc_blocks, int cmlm_blocks, int heads, int d_ff,
                       int pm_d_e, int pm_d_h, int pm_d_a, int pm_d_f,
                       int pm_blocks, int pm_heads, int pm_gru) {
    Rng rng(seed);
    PyModels out;
    EncoderConfig enc{d_feat, d_model, enc_blocks, heads, d_ff, vocab};
    CmlmConfig cmlm{vocab, d_model, cmlm_blocks, heads, d_ff};
    PmConfig pm{vocab, pm_d_e, pm_d_h, pm_d_a, pm_d_f, pm_blocks, pm_heads, pm_gru};
    out.models.encoder = EncoderStack::create(enc, rng);
    out.models.cmlm = Cmlm::create(cmlm, rng);
    out.models.pm = PmWeights::create(pm, rng);
    return out;
  }

  void save(const std::string& path) { save_models(path, models); }

  py::dict dictate_features(const py::array_t<double, py::array::c_style | py::array::forcecast>& features,
                            double p_thr, int iters, const std::string& conf_mode) {
    require(models.encoder.has_value() && models.cmlm.has_value(),
            "dictation needs encoder and CMLM weights");
    MaskCtcConfig cfg{p_thr, iters, parse_confidence_mode(conf_mode)};
    return result_dict(dictate(matrix_from_numpy(features), *models.encoder,
                               *models.cmlm, cfg));
  }

  py::dict dictate_posteriors(const py::array_t<double, py::array::c_style | py::array::forcecast>& grid,
                              py::object memory, double p_thr, int iters,
                              const std::string& conf_mode) {
    require(models.cmlm.has_value(), "dictation needs CMLM weights");
    PosteriorGrid g = grid_from_numpy(grid);
    Matrix mem = memory.is_none()
                     ? Matrix(g.frames(), models.cmlm->cfg.d_model)
                     : matrix_from_numpy(memory.cast<py::array_t<
                           double, py::array::c_style | py::array::forcecast>>());
    MaskCtcConfig cfg{p_thr, iters, parse_confidence_mode(conf_mode)};
    return result_dict(dictate_from_grid(g, mem, *models.cmlm, cfg));
  }

  std::vector<Judgement> judge(const std::vector<int>& dictated,
                               const std::vector<double>& confidences,
                               const std::vector<int>& prompt) {
    require(models.pm.has_value(), "judging needs pronunciation model weights");
    return pm_forward(PmInput{dictated, confidences, prompt}, *models.pm);
  }

 private:
  static py::dict result_dict(const DictationResult& r) {
    py::dict d;
    d["tokens"] = r.tokens;
    d["confidences"] = r.confidences;
    py::list trace;
    for (const RefineStep& s : r.trace) {
      py::dict step;
      step["masked"] = s.masked_positions;
      step["filled"] = s.filled_positions;
      trace.append(step);
    }
    d["iterations"] = trace;
    d["decode_seconds"] = r.decode_seconds;
    return d;
  }
};

}  // namespace

PYBIND11_MODULE(_mdd, m) {
  m.doc() = "Non-autoregressive mispronunciation detection and diagnosis engine";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  py::class_<PhoneInventory>(m, "PhoneInventory")
      .def_static("load", &PhoneInventory::load, py::arg("path"))
      .def_property_readonly("size", &PhoneInventory::size)
      .def_property_readonly("has_anti", &PhoneInventory::has_anti)
      .def_property_readonly("num_canonical", &PhoneInventory::num_canonical)
      .def("symbol", [](const PhoneInventory& inv, int id) { return inv.symbol(id); })
      .def("id", &PhoneInventory::id, py::arg("symbol"))
      .def("find", &PhoneInventory::find, py::arg("symbol"))
      .def("kind", [](const PhoneInventory& inv, int id) {
        return std::string(kind_name(inv.phone(id).kind));
      })
      .def("anti_of", &PhoneInventory::anti_of, py::arg("canonical_id"))
      .def("base_of", &PhoneInventory::base_of, py::arg("anti_id"))
      .def("canonical_ids", &PhoneInventory::canonical_ids)
      .def("encode", [](const PhoneInventory& inv, const std::vector<std::string>& s) {
        return inv.encode(s);
      })
      .def("decode", [](const PhoneInventory& inv, const std::vector<int>& ids) {
        return inv.decode(ids);
      });

  py::class_<FoldingMap>(m, "FoldingMap")
      .def_static("load", &FoldingMap::load, py::arg("path"))
      .def(
          "fold",
          [](const FoldingMap& map, const std::vector<std::string>& seq,
             const std::string& anti_mode) {
            AntiFoldMode mode = anti_mode == "single" ? AntiFoldMode::kSingleLabel
                                                      : AntiFoldMode::kPerPhone;
            return map.fold(seq, mode);
          },
          py::arg("seq"), py::arg("anti_mode") = "per-phone")
      .def("fold_symbol", [](const FoldingMap& map, const std::string& s) {
        return map.fold_symbol(s);
      });

  py::class_<TokenSpan>(m, "TokenSpan")
      .def_readonly("token", &TokenSpan::token)
      .def_readonly("start_frame", &TokenSpan::start_frame)
      .def_readonly("end_frame", &TokenSpan::end_frame)
      .def_readonly("confidence", &TokenSpan::confidence)
      .def("__repr__", [](const TokenSpan& s) {
        return str_cat("TokenSpan(token=", s.token, ", start=", s.start_frame,
                       ", end=", s.end_frame, ")");
      });

  m.def("greedy_path", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& grid) {
    return greedy_path(grid_from_numpy(grid));
  });
  m.def("collapse", &collapse, py::arg("path"));
  m.def(
      "token_confidence",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& grid,
         std::vector<TokenSpan> spans, const std::string& mode) {
        return token_confidence(grid_from_numpy(grid), spans,
                                parse_confidence_mode(mode));
      },
      py::arg("grid"), py::arg("spans"), py::arg("mode") = "max");
  m.def("ctc_forward_logprob",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& grid,
           const std::vector<int>& labels) {
          return ctc_forward_logprob(grid_from_numpy(grid), labels);
        });

  m.def("align", [](const std::vector<std::string>& ref,
                    const std::vector<std::string>& hyp) {
    py::list out;
    for (const AlignmentOp& op : align(ref, hyp)) {
      out.append(py::make_tuple(
          edit_kind_name(op.kind),
          op.ref_index >= 0 ? py::object(py::int_(op.ref_index)) : py::none(),
          op.hyp_index >= 0 ? py::object(py::int_(op.hyp_index)) : py::none()));
    }
    return out;
  });
  m.def("per", [](const std::vector<std::string>& ref,
                  const std::vector<std::string>& hyp) { return per(ref, hyp); });
  m.def("f1", [](double pr, double re) { return opt(f1(pr, re)); });

  py::class_<Judgement>(m, "Judgement")
      .def_readonly("position", &Judgement::position)
      .def_property_readonly(
          "label", [](const Judgement& j) { return std::string(label_name(j.label)); })
      .def_readonly("probability", &Judgement::probability)
      .def("__repr__", [](const Judgement& j) {
        return str_cat("Judgement(", j.position, ", ", label_name(j.label), ", ",
                       j.probability, ")");
      });

  py::class_<UtteranceRecord>(m, "UtteranceRecord")
      .def(py::init<>())
      .def_readwrite("utt_id", &UtteranceRecord::utt_id)
      .def_readwrite("canonical", &UtteranceRecord::canonical)
      .def_readwrite("annotated", &UtteranceRecord::annotated)
      .def_readwrite("hypothesis", &UtteranceRecord::hypothesis)
      .def_readwrite("has_hypothesis", &UtteranceRecord::has_hypothesis)
      .def_readwrite("judgements", &UtteranceRecord::judgements)
      .def_readwrite("has_judgements", &UtteranceRecord::has_judgements)
      .def_readwrite("duration_seconds", &UtteranceRecord::duration_seconds)
      .def_readwrite("decode_seconds", &UtteranceRecord::decode_seconds)
      .def_readwrite("truth", &UtteranceRecord::truth);

  m.def(
      "classify",
      [](const UtteranceRecord& rec, bool use_judgements, bool skip_dels) {
        return counts_dict(classify(rec, ClassifyOptions{use_judgements, skip_dels}));
      },
      py::arg("record"), py::arg("use_judgements") = false,
      py::arg("skip_dels") = false);
  m.def(
      "evaluate",
      [](const std::vector<UtteranceRecord>& corpus, bool use_judgements,
         bool skip_dels, bool dar_per_utterance) {
        ReportOptions opts;
        opts.classify = ClassifyOptions{use_judgements, skip_dels};
        opts.dar_per_utterance = dar_per_utterance;
        return report_dict(report(corpus, opts));
      },
      py::arg("corpus"), py::arg("use_judgements") = false,
      py::arg("skip_dels") = false, py::arg("dar_per_utterance") = false);

  m.def(
      "synth_corpus",
      [](const PhoneInventory& inv, const std::vector<std::vector<std::string>>& prompts,
         uint64_t seed, double p_sub, double p_del, double p_ins, double p_anti,
         double seconds_per_phone) {
        SynthSpec spec{p_sub, p_del, p_ins, p_anti, seed, seconds_per_phone};
        return synth_corpus(inv, prompts, spec);
      },
      py::arg("inventory"), py::arg("prompts"), py::arg("seed") = 0,
      py::arg("p_sub") = 0.0, py::arg("p_del") = 0.0, py::arg("p_ins") = 0.0,
      py::arg("p_anti") = 0.0, py::arg("seconds_per_phone") = 0.0);

  m.def("load_corpus", &load_corpus, py::arg("path"), py::arg("inventory"));
  m.def("read_matrix",
        [](const std::string& path) { return numpy_from_matrix(read_matrix(path)); });
  m.def("write_matrix",
        [](const std::string& path,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
          write_matrix(path, matrix_from_numpy(arr));
        });

  py::class_<PyModels>(m, "Models")
      .def_static("load", &PyModels::load, py::arg("path"))
      .def_static("init", &PyModels::init, py::arg("vocab"), py::arg("seed") = 1,
                  py::arg("d_feat") = 80, py::arg("d_model") = 64,
                  py::arg("enc_blocks") = 2, py::arg("cmlm_blocks") = 2,
                  py::arg("heads") = 4, py::arg("d_ff") = 128,
                  py::arg("pm_d_e") = 64, py::arg("pm_d_h") = 128,
                  py::arg("pm_d_a") = 128, py::arg("pm_d_f") = 128,
                  py::arg("pm_blocks") = 2, py::arg("pm_heads") = 4,
                  py::arg("pm_gru") = 1)
      .def("save", &PyModels::save, py::arg("path"))
      .def("dictate_features", &PyModels::dictate_features, py::arg("features"),
           py::arg("p_thr") = 0.5, py::arg("iters") = 10,
           py::arg("conf_mode") = "max")
      .def("dictate_posteriors", &PyModels::dictate_posteriors, py::arg("grid"),
           py::arg("memory") = py::none(), py::arg("p_thr") = 0.5,
           py::arg("iters") = 10, py::arg("conf_mode") = "max")
      .def("judge", &PyModels::judge, py::arg("dictated"), py::arg("confidences"),
           py::arg("prompt"));
}
