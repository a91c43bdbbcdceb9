// include/mdd/io.h

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

#ifndef MDD_IO_H_
#define MDD_IO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdd/eval.h"
#include "mdd/maskctc.h"
#include "mdd/matrix.h"
#include "mdd/phone_inventory.h"
#include "mdd/pronunciation.h"

namespace mdd {

// MATX: "MATX" magic, u32 rows, u32 cols, float32 row-major payload.
// Everything little-endian. Values stored at single precision.
Matrix read_matrix(const std::string& path);
void write_matrix(const std::string& path, const Matrix& m);

// NNWT: "NNWT" magic, u32 tensor count, then per tensor: u16 name length,
// name bytes, u8 ndim, u32 dims, float32 payload. Little-endian.
struct NamedTensor {
  std::string name;
  std::vector<uint32_t> dims;
  std::vector<double> values;  // widened from float32

  Matrix as_matrix() const;  // ndim 1 -> 1xN, ndim 2 -> RxC
  static NamedTensor from_matrix(const std::string& name, const Matrix& m);
};

struct TensorFile {
  std::vector<NamedTensor> tensors;
  const NamedTensor* find(const std::string& name) const;
  const NamedTensor& at(const std::string& name) const;
};

TensorFile read_tensors(const std::string& path);
void write_tensors(const std::string& path, const TensorFile& file);

// Model container on top of NNWT: any subset of the three networks, each
// with an hparams tensor describing its dimensions.
struct ModelFile {
  std::optional<EncoderStack> encoder;
  std::optional<Cmlm> cmlm;
  std::optional<PmWeights> pm;
};

void save_models(const std::string& path, ModelFile& models);
ModelFile load_models(const std::string& path);

// Corpus JSON-lines: one record per line with fields utt_id, canonical,
// annotated and optional hypothesis, judgements, duration_seconds, truth.
// Symbols are validated against the inventory.
std::vector<UtteranceRecord> load_corpus(const std::string& path,
                                         const PhoneInventory& inventory);
std::string corpus_line(const UtteranceRecord& rec);
void save_corpus(const std::string& path,
                 std::span<const UtteranceRecord> corpus);

}  // namespace mdd

#endif  // MDD_IO_H_
