// include/mdd/phone_inventory.h

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

#ifndef MDD_PHONE_INVENTORY_H_
#define MDD_PHONE_INVENTORY_H_

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mdd/common.h"

namespace mdd {

enum class PhoneKind { kBlank, kMask, kCanonical, kAnti };

const char* kind_name(PhoneKind k);
PhoneKind parse_kind(const std::string& s);

struct Phone {
  int id = -1;
  std::string symbol;
  PhoneKind kind = PhoneKind::kCanonical;
};

// Anti-phone symbols are the base symbol suffixed with "*".
bool is_anti_symbol(const std::string& symbol);
std::string anti_symbol(const std::string& base);
std::string base_symbol(const std::string& anti);

// Ordered phone set: blank at id 0, mask at id 1, then canonical phones and
// (optionally) one anti phone per canonical phone. Immutable after load.
class PhoneInventory {
 public:
  static PhoneInventory load(const std::string& path);
  // phones given as (symbol, kind) in id order; validates all invariants.
  static PhoneInventory build(
      const std::vector<std::pair<std::string, PhoneKind>>& phones);

  static constexpr int kBlankId = 0;
  static constexpr int kMaskId = 1;

  int size() const { return static_cast<int>(phones_.size()); }
  const Phone& phone(int id) const;
  const std::string& symbol(int id) const { return phone(id).symbol; }
  int id(const std::string& symbol) const;    // throws on unknown symbol
  int find(const std::string& symbol) const;  // -1 when missing

  bool has_anti() const { return !anti_of_.empty(); }
  int num_canonical() const { return num_canonical_; }
  std::vector<int> canonical_ids() const;

  int anti_of(int canonical_id) const;
  int base_of(int anti_id) const;

  std::vector<int> encode(std::span<const std::string> symbols) const;
  std::vector<std::string> decode(std::span<const int> ids) const;

 private:
  std::vector<Phone> phones_;
  std::unordered_map<std::string, int> by_symbol_;
  std::unordered_map<int, int> anti_of_;   // canonical id -> anti id
  std::unordered_map<int, int> base_of_;   // anti id -> canonical id
  int num_canonical_ = 0;
};

enum class AntiFoldMode {
  kPerPhone,     // anti phones fold with their base: fold(p*) = fold(p)*
  kSingleLabel,  // every anti phone folds to the single label "*"
};

// Source symbol -> target symbol map, total over the source canonical set
// and idempotent on target symbols.
class FoldingMap {
 public:
  static FoldingMap load(const std::string& path);
  static FoldingMap build(std::vector<std::pair<std::string, std::string>> entries);

  std::string fold_symbol(const std::string& s,
                          AntiFoldMode mode = AntiFoldMode::kPerPhone) const;
  std::vector<std::string> fold(std::span<const std::string> seq,
                                AntiFoldMode mode = AntiFoldMode::kPerPhone) const;

  // Every canonical symbol of `source` must appear as a key.
  void validate_against(const PhoneInventory& source) const;

  size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, std::string> entries_;
};

}  // namespace mdd

#endif  // MDD_PHONE_INVENTORY_H_
