// src/phone_inventory.cc

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

#include "mdd/phone_inventory.h"

#include <fstream>

namespace mdd {

namespace {

// Splits a TSV line into exactly two fields.
std::pair<std::string, std::string> split_tsv2(const std::string& line,
                                               const std::string& where) {
  size_t tab = line.find('\t');
  require(tab != std::string::npos && line.find('\t', tab + 1) == std::string::npos,
          str_cat(where, ": expected exactly two tab-separated fields: '", line, "'"));
  std::string a = line.substr(0, tab);
  std::string b = line.substr(tab + 1);
  require(!a.empty() && !b.empty(), str_cat(where, ": empty field: '", line, "'"));
  return {a, b};
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

const char* kind_name(PhoneKind k) {
  switch (k) {
    case PhoneKind::kBlank: return "blank";
    case PhoneKind::kMask: return "mask";
    case PhoneKind::kCanonical: return "canonical";
    case PhoneKind::kAnti: return "anti";
  }
  return "?";
}

PhoneKind parse_kind(const std::string& s) {
  if (s == "blank") return PhoneKind::kBlank;
  if (s == "mask") return PhoneKind::kMask;
  if (s == "canonical") return PhoneKind::kCanonical;
  if (s == "anti") return PhoneKind::kAnti;
  fail(str_cat("unknown phone kind '", s, "'"));
}

bool is_anti_symbol(const std::string& symbol) {
  return symbol.size() >= 2 && symbol.back() == '*';
}

std::string anti_symbol(const std::string& base) { return base + "*"; }

std::string base_symbol(const std::string& anti) {
  require(is_anti_symbol(anti), str_cat("'", anti, "' is not an anti symbol"));
  return anti.substr(0, anti.size() - 1);
}

PhoneInventory PhoneInventory::load(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), str_cat("cannot open inventory file ", path));
  std::vector<std::pair<std::string, PhoneKind>> phones;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto [symbol, kind] = split_tsv2(line, str_cat(path, ":", lineno));
    phones.emplace_back(symbol, parse_kind(kind));
  }
  try {
    return build(phones);
  } catch (const DataError& e) {
    fail(str_cat(path, ": ", e.what()));
  }
}

PhoneInventory PhoneInventory::build(
    const std::vector<std::pair<std::string, PhoneKind>>& phones) {
  PhoneInventory inv;
  require(phones.size() >= 3, "inventory needs blank, mask and at least one phone");
  for (size_t i = 0; i < phones.size(); ++i) {
    const auto& [symbol, kind] = phones[i];
    require(inv.by_symbol_.emplace(symbol, static_cast<int>(i)).second,
            str_cat("duplicate symbol '", symbol, "'"));
    inv.phones_.push_back(Phone{static_cast<int>(i), symbol, kind});
    if (kind == PhoneKind::kBlank)
      require(i == kBlankId, "blank must be the first phone (id 0)");
    if (kind == PhoneKind::kMask)
      require(i == kMaskId, "mask must be the second phone (id 1)");
    if (kind == PhoneKind::kCanonical) ++inv.num_canonical_;
  }
  require(inv.phones_[kBlankId].kind == PhoneKind::kBlank, "missing blank phone at id 0");
  require(inv.phones_[kMaskId].kind == PhoneKind::kMask, "missing mask phone at id 1");
  require(inv.num_canonical_ >= 1, "inventory has no canonical phones");

  int num_anti = 0;
  for (const Phone& p : inv.phones_) {
    if (p.kind != PhoneKind::kAnti) continue;
    ++num_anti;
    require(is_anti_symbol(p.symbol),
            str_cat("anti symbol '", p.symbol, "' must end with '*'"));
    int base = inv.find(base_symbol(p.symbol));
    require(base >= 0 && inv.phones_[base].kind == PhoneKind::kCanonical,
            str_cat("anti symbol '", p.symbol, "' has no canonical base phone"));
    require(inv.anti_of_.emplace(base, p.id).second,
            str_cat("canonical phone '", inv.phones_[base].symbol,
                    "' paired with more than one anti phone"));
    inv.base_of_.emplace(p.id, base);
  }
  require(num_anti == 0 || num_anti == inv.num_canonical_,
          str_cat("anti-pairing incomplete: ", num_anti, " anti phones for ",
                  inv.num_canonical_, " canonical phones"));
  return inv;
}

const Phone& PhoneInventory::phone(int id) const {
  require(0 <= id && id < size(), str_cat("phone id ", id, " out of range"));
  return phones_[id];
}

int PhoneInventory::id(const std::string& symbol) const {
  int i = find(symbol);
  require(i >= 0, str_cat("unknown phone symbol '", symbol, "'"));
  return i;
}

int PhoneInventory::find(const std::string& symbol) const {
  auto it = by_symbol_.find(symbol);
  return it == by_symbol_.end() ? -1 : it->second;
}

std::vector<int> PhoneInventory::canonical_ids() const {
  std::vector<int> ids;
  ids.reserve(num_canonical_);
  for (const Phone& p : phones_)
    if (p.kind == PhoneKind::kCanonical) ids.push_back(p.id);
  return ids;
}

int PhoneInventory::anti_of(int canonical_id) const {
  const Phone& p = phone(canonical_id);
  require(p.kind == PhoneKind::kCanonical,
          str_cat("anti_of: phone '", p.symbol, "' is not canonical"));
  require(has_anti(), "anti phones are not enabled in this inventory");
  return anti_of_.at(canonical_id);
}

int PhoneInventory::base_of(int anti_id) const {
  const Phone& p = phone(anti_id);
  require(p.kind == PhoneKind::kAnti,
          str_cat("base_of: phone '", p.symbol, "' is not an anti phone"));
  return base_of_.at(anti_id);
}

std::vector<int> PhoneInventory::encode(std::span<const std::string> symbols) const {
  std::vector<int> ids;
  ids.reserve(symbols.size());
  for (const std::string& s : symbols) ids.push_back(id(s));
  return ids;
}

std::vector<std::string> PhoneInventory::decode(std::span<const int> ids) const {
  std::vector<std::string> symbols;
  symbols.reserve(ids.size());
  for (int i : ids) symbols.push_back(symbol(i));
  return symbols;
}

FoldingMap FoldingMap::load(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), str_cat("cannot open folding map ", path));
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    entries.push_back(split_tsv2(line, str_cat(path, ":", lineno)));
  }
  try {
    return build(std::move(entries));
  } catch (const DataError& e) {
    fail(str_cat(path, ": ", e.what()));
  }
}

FoldingMap FoldingMap::build(std::vector<std::pair<std::string, std::string>> entries) {
  FoldingMap map;
  for (auto& [src, dst] : entries)
    require(map.entries_.emplace(src, dst).second,
            str_cat("duplicate folding source '", src, "'"));
  // Idempotence: every target must itself fold to itself.
  for (const auto& [src, dst] : map.entries_) {
    auto it = map.entries_.find(dst);
    require(it != map.entries_.end() && it->second == dst,
            str_cat("folding target '", dst, "' does not fold to itself"));
  }
  return map;
}

std::string FoldingMap::fold_symbol(const std::string& s, AntiFoldMode mode) const {
  if (is_anti_symbol(s)) {
    if (mode == AntiFoldMode::kSingleLabel) return "*";
    return anti_symbol(fold_symbol(base_symbol(s), mode));
  }
  if (s == "*") return s;  // collapsed mispronunciation label
  auto it = entries_.find(s);
  require(it != entries_.end(), str_cat("symbol '", s, "' not in folding map"));
  return it->second;
}

std::vector<std::string> FoldingMap::fold(std::span<const std::string> seq,
                                          AntiFoldMode mode) const {
  std::vector<std::string> out;
  out.reserve(seq.size());
  for (const std::string& s : seq) out.push_back(fold_symbol(s, mode));
  return out;
}

void FoldingMap::validate_against(const PhoneInventory& source) const {
  for (int id : source.canonical_ids())
    require(entries_.count(source.symbol(id)) == 1,
            str_cat("folding map misses canonical symbol '", source.symbol(id), "'"));
}

}  // namespace mdd
