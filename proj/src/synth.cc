// src/synth.cc

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

#include "mdd/synth.h"

#include <cstdio>

#include "mdd/rng.h"

namespace mdd {

void SynthSpec::validate() const {
  for (double p : {p_sub, p_del, p_ins, p_anti})
    require(p >= 0.0 && p <= 1.0, "synth rates must lie in [0,1]");
  require(p_sub + p_del <= 1.0,
          "p_sub + p_del must not exceed 1 (exclusive per-position events)");
  require(seconds_per_phone >= 0.0, "seconds_per_phone must be non-negative");
}

std::vector<UtteranceRecord> synth_corpus(
    const PhoneInventory& inventory,
    std::span<const std::vector<std::string>> prompts, const SynthSpec& spec) {
  spec.validate();
  require(!prompts.empty(), "synth: no prompts given");
  std::vector<int> canonical = inventory.canonical_ids();
  require(canonical.size() >= 2,
          "synth needs at least two canonical phones to substitute");
  require(spec.p_anti == 0.0 || inventory.has_anti(),
          "p_anti > 0 requires an inventory with anti phones");

  std::vector<UtteranceRecord> corpus;
  corpus.reserve(prompts.size());
  for (size_t u = 0; u < prompts.size(); ++u) {
    UtteranceRecord rec;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "synth-%04zu", u);
    rec.utt_id = buf;
    rec.canonical = prompts[u];
    require(!rec.canonical.empty(), str_cat(rec.utt_id, ": empty prompt"));

    uint64_t utt_key = Rng::mix(spec.seed, Rng::hash_str(rec.utt_id));
    for (size_t pos = 0; pos < rec.canonical.size(); ++pos) {
      const std::string& symbol = rec.canonical[pos];
      int canon_id = inventory.id(symbol);
      require(inventory.phone(canon_id).kind == PhoneKind::kCanonical,
              str_cat(rec.utt_id, ": prompt symbol '", symbol,
                      "' is not canonical"));

      Rng rng(Rng::mix(utt_key, pos));
      double event = rng.uniform();
      if (event < spec.p_del) {
        rec.truth.push_back("del");
      } else if (event < spec.p_del + spec.p_sub) {
        rec.truth.push_back("sub");
        if (rng.uniform() < spec.p_anti) {
          rec.annotated.push_back(inventory.symbol(inventory.anti_of(canon_id)));
        } else {
          // Uniform over the other canonical phones.
          uint64_t k = rng.bounded(canonical.size() - 1);
          int pick = canonical[k];
          if (pick == canon_id) pick = canonical[canonical.size() - 1];
          rec.annotated.push_back(inventory.symbol(pick));
        }
      } else {
        rec.truth.push_back("ok");
        rec.annotated.push_back(symbol);
      }
      if (rng.uniform() < spec.p_ins) {
        uint64_t k = rng.bounded(canonical.size());
        rec.annotated.push_back(inventory.symbol(canonical[k]));
      }
    }
    // A prompt may degenerate to an empty annotation only through deletions;
    // keep the record valid by voicing at least one phone.
    if (rec.annotated.empty()) {
      rec.annotated.push_back(rec.canonical[0]);
      rec.truth[0] = "ok";
    }
    if (spec.seconds_per_phone > 0)
      rec.duration_seconds =
          spec.seconds_per_phone * static_cast<double>(rec.annotated.size());
    corpus.push_back(std::move(rec));
  }
  return corpus;
}

}  // namespace mdd
