// include/mdd/synth.h

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

#ifndef MDD_SYNTH_H_
#define MDD_SYNTH_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdd/eval.h"
#include "mdd/phone_inventory.h"

namespace mdd {

// L2-error simulation rates. Deletion and substitution are exclusive
// per-position events; p_anti is the fraction of substitutions realized as
// the position's anti phone.
struct SynthSpec {
  double p_sub = 0.0;
  double p_del = 0.0;
  double p_ins = 0.0;
  double p_anti = 0.0;
  uint64_t seed = 0;
  double seconds_per_phone = 0.0;  // > 0 emits duration_seconds
  void validate() const;
};

// Derives an annotated pronunciation per prompt. Randomness is keyed by
// (seed, utt_id, position), so records are reproducible independently of
// generation order. Each record carries per-canonical-position ground-truth
// labels (ok|sub|del).
std::vector<UtteranceRecord> synth_corpus(
    const PhoneInventory& inventory,
    std::span<const std::vector<std::string>> prompts, const SynthSpec& spec);

}  // namespace mdd

#endif  // MDD_SYNTH_H_
