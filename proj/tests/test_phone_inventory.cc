// tests/test_phone_inventory.cc

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

#include "test_util.h"

namespace mdd {

using test::TempDir;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

void test_load_full_inventory() {
  PhoneInventory inv = PhoneInventory::load(test::data_file("timit48.tsv"));
  CHECK_EQ(inv.size(), 98);  // blank + mask + 48 canonical + 48 anti
  CHECK_EQ(inv.num_canonical(), 48);
  CHECK(inv.has_anti());
  CHECK_EQ(inv.phone(PhoneInventory::kBlankId).symbol, "<blank>");
  CHECK_EQ(inv.phone(PhoneInventory::kMaskId).symbol, "<mask>");
  for (int i = 0; i < inv.size(); ++i) CHECK_EQ(inv.phone(i).id, i);
}

void test_minimal_inventory() {
  TempDir tmp("inv_min");
  write_file(tmp.path("inv.tsv"), "<blank>\tblank\n<mask>\tmask\naa\tcanonical\n");
  PhoneInventory inv = PhoneInventory::load(tmp.path("inv.tsv"));
  CHECK_EQ(inv.size(), 3);
  CHECK(!inv.has_anti());
  CHECK_THROWS(inv.anti_of(inv.id("aa")));
}

void test_load_errors() {
  TempDir tmp("inv_err");
  write_file(tmp.path("dup.tsv"),
             "<blank>\tblank\n<mask>\tmask\naa\tcanonical\naa\tcanonical\n");
  CHECK_THROWS(PhoneInventory::load(tmp.path("dup.tsv")));
  write_file(tmp.path("noblank.tsv"), "<mask>\tmask\naa\tcanonical\nbb\tcanonical\n");
  CHECK_THROWS(PhoneInventory::load(tmp.path("noblank.tsv")));
  write_file(tmp.path("badline.tsv"), "<blank>\tblank\n<mask>\tmask\naa canonical\n");
  CHECK_THROWS(PhoneInventory::load(tmp.path("badline.tsv")));
  // Anti phones must pair with every canonical phone.
  write_file(tmp.path("partial.tsv"),
             "<blank>\tblank\n<mask>\tmask\naa\tcanonical\nbb\tcanonical\naa*\tanti\n");
  CHECK_THROWS(PhoneInventory::load(tmp.path("partial.tsv")));
  CHECK_THROWS(PhoneInventory::load(tmp.path("missing.tsv")));
}

void test_anti_pairing() {
  PhoneInventory inv = PhoneInventory::load(test::data_file("timit48.tsv"));
  int aa = inv.id("aa");
  int aa_anti = inv.anti_of(aa);
  CHECK_EQ(inv.symbol(aa_anti), "aa*");
  CHECK_EQ(inv.base_of(aa_anti), aa);
  for (int c : inv.canonical_ids()) CHECK_EQ(inv.base_of(inv.anti_of(c)), c);
  CHECK_THROWS(inv.anti_of(PhoneInventory::kBlankId));
  CHECK_THROWS(inv.base_of(aa));
}

void test_codec_roundtrip() {
  PhoneInventory inv = PhoneInventory::load(test::data_file("timit48.tsv"));
  for (int i = 0; i < inv.size(); ++i) CHECK_EQ(inv.id(inv.symbol(i)), i);
  std::vector<std::string> seq = {"aa", "ae*", "sil"};
  CHECK(inv.decode(inv.encode(seq)) == seq);
  CHECK_THROWS(inv.id("nonesuch"));
  CHECK_EQ(inv.find("nonesuch"), -1);
}

void test_folding_basics() {
  FoldingMap map = FoldingMap::load(test::data_file("fold48to39.tsv"));
  CHECK_EQ(map.fold_symbol("ax"), "ah");
  CHECK_EQ(map.fold_symbol("aa"), "aa");
  CHECK_EQ(map.fold_symbol("ax*"), "ah*");  // anti phones fold via their base
  CHECK_EQ(map.fold_symbol("zh*", AntiFoldMode::kSingleLabel), "*");
  std::vector<std::string> seq = {"ix", "zh", "cl", "iy"};
  std::vector<std::string> folded = map.fold(seq);
  CHECK(folded == (std::vector<std::string>{"ih", "sh", "sil", "iy"}));
  CHECK_EQ(folded.size(), seq.size());
  CHECK_THROWS(map.fold_symbol("nonesuch"));
  CHECK_THROWS(map.fold_symbol("<blank>"));
}

void test_folding_idempotent() {
  FoldingMap map = FoldingMap::load(test::data_file("fold48to39.tsv"));
  PhoneInventory inv = PhoneInventory::load(test::data_file("timit48.tsv"));
  map.validate_against(inv);
  for (int c : inv.canonical_ids()) {
    std::string once = map.fold_symbol(inv.symbol(c));
    CHECK_EQ(map.fold_symbol(once), once);
    std::string anti_once = map.fold_symbol(anti_symbol(inv.symbol(c)));
    CHECK_EQ(map.fold_symbol(anti_once), anti_once);
  }
}

void test_folding_validation() {
  // A target that does not fold to itself breaks idempotence.
  CHECK_THROWS(FoldingMap::build({{"a", "b"}, {"b", "c"}, {"c", "c"}}));
  // Total-map validation against an inventory.
  FoldingMap partial = FoldingMap::build({{"aa", "aa"}});
  PhoneInventory inv = PhoneInventory::load(test::data_file("timit48.tsv"));
  CHECK_THROWS(partial.validate_against(inv));
}

}  // namespace mdd

int main() {
  using mdd::test::Case;
  return mdd::test::run({
      Case{"load_full_inventory", mdd::test_load_full_inventory},
      Case{"minimal_inventory", mdd::test_minimal_inventory},
      Case{"load_errors", mdd::test_load_errors},
      Case{"anti_pairing", mdd::test_anti_pairing},
      Case{"codec_roundtrip", mdd::test_codec_roundtrip},
      Case{"folding_basics", mdd::test_folding_basics},
      Case{"folding_idempotent", mdd::test_folding_idempotent},
      Case{"folding_validation", mdd::test_folding_validation},
  });
}
