// src/io.cc

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

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace mdd {

namespace {

using ordered_json = nlohmann::ordered_json;

void put_u16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float f) {
  put_u32(out, std::bit_cast<uint32_t>(f));
}

class Reader {
 public:
  Reader(std::string bytes, std::string path)
      : bytes_(std::move(bytes)), path_(std::move(path)) {}

  std::string take(size_t n, const char* what) {
    require(pos_ + n <= bytes_.size(),
            str_cat(path_, ": truncated file while reading ", what));
    std::string out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  uint16_t u16(const char* what) {
    std::string b = take(2, what);
    return static_cast<uint16_t>(static_cast<unsigned char>(b[0])) |
           static_cast<uint16_t>(static_cast<unsigned char>(b[1])) << 8;
  }
  uint32_t u32(const char* what) {
    std::string b = take(4, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  uint8_t u8(const char* what) {
    return static_cast<unsigned char>(take(1, what)[0]);
  }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  bool done() const { return pos_ == bytes_.size(); }
  const std::string& path() const { return path_; }

 private:
  std::string bytes_;
  std::string path_;
  size_t pos_ = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), str_cat("cannot open ", path));
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return bytes;
}

void spew(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), str_cat("cannot write ", path));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(out.good(), str_cat("write failed for ", path));
}

float to_f32_checked(double v, const std::string& path) {
  require(std::isfinite(v), str_cat(path, ": non-finite value"));
  return static_cast<float>(v);
}

}  // namespace

Matrix read_matrix(const std::string& path) {
  Reader r(slurp(path), path);
  require(r.take(4, "magic") == "MATX", str_cat(path, ": bad magic (want MATX)"));
  uint32_t rows = r.u32("rows");
  uint32_t cols = r.u32("cols");
  Matrix m(static_cast<int>(rows), static_cast<int>(cols));
  for (int64_t i = 0; i < m.size(); ++i) {
    double v = r.f32("payload");
    require(std::isfinite(v), str_cat(path, ": non-finite value in payload"));
    m.data()[i] = v;
  }
  require(r.done(), str_cat(path, ": trailing bytes after payload"));
  return m;
}

void write_matrix(const std::string& path, const Matrix& m) {
  std::string out;
  out += "MATX";
  put_u32(out, static_cast<uint32_t>(m.rows()));
  put_u32(out, static_cast<uint32_t>(m.cols()));
  for (int64_t i = 0; i < m.size(); ++i)
    put_f32(out, to_f32_checked(m.data()[i], path));
  spew(path, out);
}

Matrix NamedTensor::as_matrix() const {
  require(dims.size() == 1 || dims.size() == 2,
          str_cat("tensor ", name, " is not vector- or matrix-shaped"));
  int rows = dims.size() == 2 ? static_cast<int>(dims[0]) : 1;
  int cols = static_cast<int>(dims.back());
  Matrix m(rows, cols);
  for (int64_t i = 0; i < m.size(); ++i) m.data()[i] = values[i];
  return m;
}

NamedTensor NamedTensor::from_matrix(const std::string& name, const Matrix& m) {
  NamedTensor t;
  t.name = name;
  t.dims = {static_cast<uint32_t>(m.rows()), static_cast<uint32_t>(m.cols())};
  t.values.assign(m.data(), m.data() + m.size());
  return t;
}

const NamedTensor* TensorFile::find(const std::string& name) const {
  for (const NamedTensor& t : tensors)
    if (t.name == name) return &t;
  return nullptr;
}

const NamedTensor& TensorFile::at(const std::string& name) const {
  const NamedTensor* t = find(name);
  require(t != nullptr, str_cat("missing tensor '", name, "'"));
  return *t;
}

TensorFile read_tensors(const std::string& path) {
  Reader r(slurp(path), path);
  require(r.take(4, "magic") == "NNWT", str_cat(path, ": bad magic (want NNWT)"));
  uint32_t count = r.u32("tensor count");
  TensorFile file;
  for (uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    uint16_t name_len = r.u16("name length");
    t.name = r.take(name_len, "tensor name");
    require(file.find(t.name) == nullptr,
            str_cat(path, ": duplicate tensor name '", t.name, "'"));
    uint8_t ndim = r.u8("ndim");
    uint64_t total = 1;
    for (uint8_t d = 0; d < ndim; ++d) {
      t.dims.push_back(r.u32("dim"));
      total *= t.dims.back();
    }
    t.values.reserve(total);
    for (uint64_t k = 0; k < total; ++k) {
      double v = r.f32("tensor payload");
      require(std::isfinite(v), str_cat(path, ": non-finite value in '", t.name, "'"));
      t.values.push_back(v);
    }
    file.tensors.push_back(std::move(t));
  }
  require(r.done(), str_cat(path, ": trailing bytes after tensors"));
  return file;
}

void write_tensors(const std::string& path, const TensorFile& file) {
  std::string out;
  out += "NNWT";
  put_u32(out, static_cast<uint32_t>(file.tensors.size()));
  for (const NamedTensor& t : file.tensors) {
    require(t.name.size() <= 0xffff, str_cat("tensor name too long: ", t.name));
    put_u16(out, static_cast<uint16_t>(t.name.size()));
    out += t.name;
    out.push_back(static_cast<char>(t.dims.size()));
    uint64_t total = 1;
    for (uint32_t d : t.dims) {
      put_u32(out, d);
      total *= d;
    }
    require(total == t.values.size(),
            str_cat("tensor '", t.name, "': dims do not match payload size"));
    for (double v : t.values) put_f32(out, to_f32_checked(v, path));
  }
  spew(path, out);
}

namespace {

std::vector<double> hparams(const TensorFile& file, const std::string& name,
                            size_t n) {
  const NamedTensor& t = file.at(name);
  require(t.values.size() == n, str_cat("tensor '", name, "' must hold ", n,
                                        " values"));
  return t.values;
}

NamedTensor hparams_tensor(const std::string& name, std::vector<double> values) {
  NamedTensor t;
  t.name = name;
  t.dims = {static_cast<uint32_t>(values.size())};
  t.values = std::move(values);
  return t;
}

// Copies every visited parameter either into the file (save) or out of it
// (load, with shape checks).
void transfer_params(TensorFile& file, bool save,
                     const std::function<void(const nn::ParamVisitor&)>& visit_all) {
  visit_all([&](const std::string& name, Matrix& m) {
    if (save) {
      file.tensors.push_back(NamedTensor::from_matrix(name, m));
    } else {
      Matrix stored = file.at(name).as_matrix();
      require(stored.same_shape(m),
              str_cat("tensor '", name, "' has shape ", stored.rows(), "x",
                      stored.cols(), ", expected ", m.rows(), "x", m.cols()));
      m = std::move(stored);
    }
  });
}

}  // namespace

void save_models(const std::string& path, ModelFile& models) {
  TensorFile file;
  if (models.encoder) {
    const EncoderConfig& c = models.encoder->cfg;
    file.tensors.push_back(hparams_tensor(
        "enc.hparams", {double(c.d_feat), double(c.d_model), double(c.n_blocks),
                        double(c.n_heads), double(c.d_ff), double(c.vocab)}));
    transfer_params(file, true, [&](const nn::ParamVisitor& v) {
      models.encoder->visit_params("enc", v);
    });
  }
  if (models.cmlm) {
    const CmlmConfig& c = models.cmlm->cfg;
    file.tensors.push_back(hparams_tensor(
        "cmlm.hparams", {double(c.vocab), double(c.d_model), double(c.n_blocks),
                         double(c.n_heads), double(c.d_ff)}));
    transfer_params(file, true, [&](const nn::ParamVisitor& v) {
      models.cmlm->visit_params("cmlm", v);
    });
  }
  if (models.pm) {
    const PmConfig& c = models.pm->cfg;
    file.tensors.push_back(hparams_tensor(
        "pm.hparams",
        {double(c.vocab), double(c.d_e), double(c.d_h), double(c.d_a),
         double(c.d_f), double(c.n_blocks), double(c.n_heads), double(c.n_gru)}));
    transfer_params(file, true, [&](const nn::ParamVisitor& v) {
      models.pm->visit_params("pm", v);
    });
  }
  write_tensors(path, file);
}

ModelFile load_models(const std::string& path) {
  TensorFile file = read_tensors(path);
  ModelFile models;
  Rng dummy(0);

  if (file.find("enc.hparams")) {
    std::vector<double> h = hparams(file, "enc.hparams", 6);
    EncoderConfig cfg{int(h[0]), int(h[1]), int(h[2]), int(h[3]), int(h[4]),
                      int(h[5])};
    models.encoder = EncoderStack::create(cfg, dummy);
    transfer_params(file, false, [&](const nn::ParamVisitor& v) {
      models.encoder->visit_params("enc", v);
    });
  }
  if (file.find("cmlm.hparams")) {
    std::vector<double> h = hparams(file, "cmlm.hparams", 5);
    CmlmConfig cfg{int(h[0]), int(h[1]), int(h[2]), int(h[3]), int(h[4])};
    models.cmlm = Cmlm::create(cfg, dummy);
    transfer_params(file, false, [&](const nn::ParamVisitor& v) {
      models.cmlm->visit_params("cmlm", v);
    });
  }
  if (file.find("pm.hparams")) {
    std::vector<double> h = hparams(file, "pm.hparams", 8);
    PmConfig cfg{int(h[0]), int(h[1]), int(h[2]), int(h[3]),
                 int(h[4]), int(h[5]), int(h[6]), int(h[7])};
    models.pm = PmWeights::create(cfg, dummy);
    transfer_params(file, false, [&](const nn::ParamVisitor& v) {
      models.pm->visit_params("pm", v);
    });
  }
  return models;
}

namespace {

std::vector<std::string> symbol_array(const ordered_json& j, const char* field,
                                      const std::string& where,
                                      const PhoneInventory& inv, bool allow_empty) {
  require(j.contains(field), str_cat(where, ": missing field '", field, "'"));
  const auto& arr = j.at(field);
  require(arr.is_array(), str_cat(where, ": field '", field, "' must be an array"));
  std::vector<std::string> out;
  for (const auto& s : arr) {
    require(s.is_string(), str_cat(where, ": '", field, "' entries must be strings"));
    std::string sym = s.get<std::string>();
    require(inv.find(sym) >= 0,
            str_cat(where, ": unknown phone symbol '", sym, "' in '", field, "'"));
    out.push_back(std::move(sym));
  }
  require(allow_empty || !out.empty(), str_cat(where, ": '", field, "' is empty"));
  return out;
}

}  // namespace

std::vector<UtteranceRecord> load_corpus(const std::string& path,
                                         const PhoneInventory& inventory) {
  std::ifstream in(path);
  require(in.good(), str_cat("cannot open corpus ", path));
  std::vector<UtteranceRecord> corpus;
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
    } catch (const nlohmann::json::exception& e) {
      fail(str_cat(where, ": malformed JSON: ", e.what()));
    }
    require(j.is_object(), str_cat(where, ": record must be a JSON object"));

    UtteranceRecord rec;
    require(j.contains("utt_id") && j.at("utt_id").is_string(),
            str_cat(where, ": missing string field 'utt_id'"));
    rec.utt_id = j.at("utt_id").get<std::string>();
    rec.canonical = symbol_array(j, "canonical", where, inventory, false);
    rec.annotated = symbol_array(j, "annotated", where, inventory, false);
    if (j.contains("hypothesis")) {
      rec.hypothesis = symbol_array(j, "hypothesis", where, inventory, true);
      rec.has_hypothesis = true;
    }
    if (j.contains("judgements")) {
      const auto& arr = j.at("judgements");
      require(arr.is_array(), str_cat(where, ": 'judgements' must be an array"));
      int pos = 0;
      for (const auto& item : arr) {
        require(item.is_object() && item.contains("label") && item.contains("prob"),
                str_cat(where, ": judgement entries need 'label' and 'prob'"));
        Judgement jd;
        jd.position = pos++;
        try {
          jd.label = parse_label(item.at("label").get<std::string>());
        } catch (const DataError& e) {
          fail(str_cat(where, ": ", e.what()));
        }
        jd.probability = item.at("prob").get<double>();
        require(jd.probability >= 0.0 && jd.probability <= 1.0,
                str_cat(where, ": judgement probability outside [0,1]"));
        rec.judgements.push_back(jd);
      }
      rec.has_judgements = true;
    }
    if (j.contains("duration_seconds")) {
      rec.duration_seconds = j.at("duration_seconds").get<double>();
      require(rec.duration_seconds > 0,
              str_cat(where, ": duration_seconds must be positive"));
    }
    if (j.contains("truth")) {
      for (const auto& s : j.at("truth")) {
        std::string label = s.get<std::string>();
        require(label == "ok" || label == "sub" || label == "del",
                str_cat(where, ": truth labels must be ok|sub|del"));
        rec.truth.push_back(label);
      }
      require(rec.truth.size() == rec.canonical.size(),
              str_cat(where, ": truth labels must align with canonical"));
    }
    corpus.push_back(std::move(rec));
  }
  return corpus;
}

std::string corpus_line(const UtteranceRecord& rec) {
  ordered_json j;
  j["utt_id"] = rec.utt_id;
  j["canonical"] = rec.canonical;
  j["annotated"] = rec.annotated;
  if (rec.has_hypothesis) j["hypothesis"] = rec.hypothesis;
  if (rec.has_judgements) {
    ordered_json arr = ordered_json::array();
    for (const Judgement& jd : rec.judgements) {
      ordered_json item;
      item["label"] = label_name(jd.label);
      item["prob"] = jd.probability;
      arr.push_back(std::move(item));
    }
    j["judgements"] = std::move(arr);
  }
  if (rec.duration_seconds > 0) j["duration_seconds"] = rec.duration_seconds;
  if (!rec.truth.empty()) j["truth"] = rec.truth;
  return j.dump();
}

void save_corpus(const std::string& path,
                 std::span<const UtteranceRecord> corpus) {
  std::string out;
  for (const UtteranceRecord& rec : corpus) {
    out += corpus_line(rec);
    out += '\n';
  }
  spew(path, out);
}

}  // namespace mdd
