// Copyright 2026 The press Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>

#include "press/util.hpp"
#include "press_testing.hpp"

namespace press {
namespace {

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Sha256, FileMatchesString) {
  testing::TempDir dir;
  write_file_atomic(dir / "f.txt", "abc");
  EXPECT_EQ(sha256_file(dir / "f.txt"), sha256_hex("abc"));
}

TEST(UnitInterval, Bounds) {
  EXPECT_EQ(unit_interval(0), 0.0);
  EXPECT_LT(unit_interval(~uint64_t{0}), 1.0);
  EXPECT_EQ(stable_hash64("x"), stable_hash64("x"));
  EXPECT_NE(stable_hash64("x"), stable_hash64("y"));
}

TEST(Text, Normalisation) {
  EXPECT_EQ(trim("  a b \n"), "a b");
  EXPECT_EQ(to_lower("AbC"), "abc");
  EXPECT_EQ(normalize_text("  I  Agree\n\tFully "), "i agree fully");
}

TEST(Csv, QuotedFieldsAndEmbeddedNewlines) {
  const auto rows = csv::parse("a,\"b,c\",\"say \"\"hi\"\"\"\r\n1,\"two\nlines\",3\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (csv::Row{"a", "b,c", "say \"hi\""}));
  EXPECT_EQ(rows[1], (csv::Row{"1", "two\nlines", "3"}));
}

TEST(Csv, EmptyFieldsAndNoTrailingNewline) {
  const auto rows = csv::parse("a,,c\n,,");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (csv::Row{"a", "", "c"}));
  EXPECT_EQ(rows[1], (csv::Row{"", "", ""}));
}

TEST(Csv, FormatRoundTrip) {
  const std::vector<csv::Row> rows = {{"plain", "with,comma", "with \"quote\""}, {"multi\nline", "", "37.5 ± 7.7"}};
  EXPECT_EQ(csv::parse(csv::format(rows)), rows);
  EXPECT_EQ(csv::escape_field("plain"), "plain");
  EXPECT_EQ(csv::escape_field("a,b"), "\"a,b\"");
}

TEST(Csv, UnterminatedQuoteIsAParseError) {
  EXPECT_THROW(csv::parse("a,\"open\n"), ParseError);
}

TEST(Jsonl, RoundTripWithSortedKeys) {
  testing::TempDir dir;
  const std::vector<nlohmann::json> recs = {{{"b", 1}, {"a", "x"}}, {{"k", nullptr}}};
  jsonl::write(dir / "r.jsonl", recs);
  EXPECT_EQ(read_file(dir / "r.jsonl"), "{\"a\":\"x\",\"b\":1}\n{\"k\":null}\n");
  EXPECT_EQ(jsonl::read(dir / "r.jsonl"), recs);
}

TEST(Jsonl, BadLineNamesTheLine) {
  testing::TempDir dir;
  write_file_atomic(dir / "bad.jsonl", "{\"a\":1}\nnot json\n");
  try {
    jsonl::read(dir / "bad.jsonl");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(hits.size(), 4, [&](size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  parallel_for(0, 4, [](size_t) { FAIL(); });
}

TEST(ParallelFor, PropagatesTheFirstException) {
  std::atomic<int> ran{0};
  EXPECT_THROW(parallel_for(20, 3,
                            [&](size_t i) {
                              ++ran;
                              if (i == 5) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
  EXPECT_GT(ran.load(), 0);
}

}  // namespace
}  // namespace press
