// Copyright 2026 The QASem Toolkit Authors.
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

#include "qasem/common.h"

#include <algorithm>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

namespace qasem {
namespace {

TEST(StringsTest, NormalizeWhitespaceCollapsesRunsAndTrims) {
  EXPECT_EQ(NormalizeWhitespace("  Who   was\tshot? \n"), "Who was shot?");
  EXPECT_EQ(NormalizeWhitespace(""), "");
  EXPECT_EQ(NormalizeWhitespace("   "), "");
}

TEST(StringsTest, SplitStringKeepsEmptyPieces) {
  EXPECT_EQ(SplitString("a</q></q>b", "</q>"),
            (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(SplitString("", ","), (std::vector<std::string>{""}));
  EXPECT_EQ(SplitString("abc", ","), (std::vector<std::string>{"abc"}));
}

TEST(StringsTest, SplitWhitespaceAndJoinAreInverse) {
  std::vector<std::string> words = {"Both", "were", "shot"};
  EXPECT_EQ(SplitWhitespace(Join(words, " ")), words);
  EXPECT_TRUE(SplitWhitespace(" \t ").empty());
}

TEST(StringsTest, CaseAndAffixes) {
  EXPECT_EQ(ToLower("While What"), "while what");
  EXPECT_EQ(Trim("  x y "), "x y");
  EXPECT_TRUE(StartsWith("parse: x", "parse: "));
  EXPECT_FALSE(StartsWith("pa", "parse"));
  EXPECT_TRUE(EndsWith("shot?", "?"));
  EXPECT_FALSE(EndsWith("?", "shot?"));
}

TEST(TaskTest, ParsesAliasesAndRejectsUnknown) {
  EXPECT_EQ(ParseTask("qasrl"), Task::kQasrl);
  EXPECT_EQ(ParseTask("QA-SRL"), Task::kQasrl);
  EXPECT_EQ(ParseTask("qanom"), Task::kQanom);
  EXPECT_EQ(ParseTask("qadiscourse"), Task::kDiscourse);
  EXPECT_EQ(std::string(TaskName(Task::kDiscourse)), "discourse");
  try {
    ParseTask("qamr");
    FAIL() << "expected an error";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(ErrorTest, MessageCarriesCodeName) {
  Error error(ErrorCode::kNoPrefix, "Purple monkeys?");
  EXPECT_EQ(error.code(), ErrorCode::kNoPrefix);
  EXPECT_NE(std::string(error.what()).find("NO_PREFIX"), std::string::npos);
}

TEST(RandomTest, SameSeedSameStream) {
  Random a(42), b(42), c(43);
  std::vector<uint64_t> xs, ys, zs;
  for (int i = 0; i < 16; ++i) {
    xs.push_back(a.Next());
    ys.push_back(b.Next());
    zs.push_back(c.Next());
  }
  EXPECT_EQ(xs, ys);
  EXPECT_NE(xs, zs);
}

TEST(RandomTest, UniformStaysInRangeAndCoversIt) {
  Random rng(7);
  std::set<uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    uint64_t x = rng.Uniform(6);
    ASSERT_LT(x, 6u);
    seen.insert(x);
  }
  EXPECT_EQ(seen.size(), 6u);
}

TEST(RandomTest, ShuffleIsAPermutation) {
  std::vector<int> items(50);
  std::iota(items.begin(), items.end(), 0);
  std::vector<int> shuffled = items;
  Random rng(3);
  rng.Shuffle(shuffled);
  EXPECT_NE(shuffled, items);
  std::sort(shuffled.begin(), shuffled.end());
  EXPECT_EQ(shuffled, items);
}

}  // namespace
}  // namespace qasem
