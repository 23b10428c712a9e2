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

#include "qasem/question_grammar.h"

#include <gtest/gtest.h>

#include "qasem/common.h"
#include "qasem/resources.h"

namespace qasem {
namespace {

const QuestionGrammar &Grammar() { return QuestionGrammar::Default(); }

std::vector<DiscoursePrefix> Prefixes() {
  return LoadDiscoursePrefixes(BundledResources().discourse_prefixes);
}

SyntacticRole RoleOf(const std::string &question, const std::string &verb) {
  return Grammar().MapToRole(Grammar().Parse(question, verb));
}

TEST(InflectionsTest, RegularMorphology) {
  EXPECT_EQ(RegularVerbForms("walk"),
            (VerbForms{"walk", "walked", "walked", "walking", "walks"}));
  EXPECT_EQ(RegularVerbForms("bake"),
            (VerbForms{"bake", "baked", "baked", "baking", "bakes"}));
  EXPECT_EQ(RegularVerbForms("try"),
            (VerbForms{"try", "tried", "tried", "trying", "tries"}));
  EXPECT_EQ(RegularVerbForms("stop"),
            (VerbForms{"stop", "stopped", "stopped", "stopping", "stops"}));
  EXPECT_EQ(RegularVerbForms("fix").third_singular, "fixes");
  EXPECT_EQ(RegularVerbForms("visit").past, "visited");
}

TEST(InflectionsTest, TableOverridesRegularRules) {
  const Inflections &inflections = Grammar().inflections();
  EXPECT_EQ(inflections.Forms("shoot").past, "shot");
  EXPECT_EQ(inflections.Forms("shoot").past_participle, "shot");
  EXPECT_TRUE(inflections.IsInflectionOf("shoot", "shot"));
  EXPECT_TRUE(inflections.IsInflectionOf("recover", "recovering"));
  EXPECT_TRUE(inflections.IsInflectionOf("confront", "confronted"));
  EXPECT_FALSE(inflections.IsInflectionOf("shoot", "recovering"));
  EXPECT_TRUE(inflections.IsPastParticiple("shot"));
  EXPECT_TRUE(inflections.IsPastParticiple("given"));
  EXPECT_FALSE(inflections.IsPastParticiple("recovering"));
}

TEST(InflectionsTest, Lemmatize) {
  const Inflections &inflections = Grammar().inflections();
  EXPECT_EQ(inflections.Lemmatize("shot"), "shoot");
  EXPECT_EQ(inflections.Lemmatize("recovering"), "recover");
  EXPECT_EQ(inflections.Lemmatize("were"), "be");
  EXPECT_EQ(inflections.Lemmatize("tried"), "try");
  EXPECT_EQ(inflections.Lemmatize("gave"), "give");
}

TEST(InflectionsTest, FromTsvRejectsShortRows) {
  EXPECT_THROW(Inflections::FromTsv("go\twent\n"), Error);
  Inflections custom = Inflections::FromTsv("# comment\nglorp\tglarp\tglorpen\tglorping\tglorps\n");
  EXPECT_TRUE(custom.IsInflectionOf("glorp", "glarp"));
  EXPECT_TRUE(custom.IsPastParticiple("glorpen"));
}

TEST(SlotInventoriesTest, WhOrder) {
  const SlotInventories &inv = Grammar().inventories();
  EXPECT_EQ(inv.wh_words,
            (std::vector<std::string>{"what", "who", "when", "where", "how", "why"}));
  EXPECT_LT(inv.WhRank("What"), inv.WhRank("Who"));
  EXPECT_LT(inv.WhRank("Where"), inv.WhRank("How"));
  EXPECT_EQ(inv.WhRank("how long"), inv.WhRank("how"));
  EXPECT_EQ(inv.WhRank("how much"), inv.WhRank("how"));
  EXPECT_LT(inv.WhRank("how"), inv.WhRank("why"));
  EXPECT_GT(inv.WhRank("whence"), inv.WhRank("why"));
}

TEST(ParseQuestionTest, WhoShotSomeone) {
  QasrlQuestion q = Grammar().Parse("Who shot someone?", "shoot");
  EXPECT_EQ(q, (QasrlQuestion{"Who", "", "", "shot", "someone", "", ""}));
}

TEST(ParseQuestionTest, WhatDidSomeoneConfrontWith) {
  QasrlQuestion q = Grammar().Parse("What did someone confront with?", "confront");
  EXPECT_EQ(q, (QasrlQuestion{"What", "did", "someone", "confront", "", "with", ""}));
}

TEST(ParseQuestionTest, MultiWordVerbGroupStaysInVerbSlot) {
  QasrlQuestion q = Grammar().Parse("Where has someone been recovering?", "recover");
  EXPECT_EQ(q, (QasrlQuestion{"Where", "has", "someone", "been recovering", "", "", ""}));
  QasrlQuestion negated = Grammar().Parse("When might something not end?", "end");
  EXPECT_EQ(negated.aux, "might");
  EXPECT_EQ(negated.verb, "not end");
}

TEST(ParseQuestionTest, CompoundWh) {
  QasrlQuestion q =
      Grammar().Parse("How long was someone recovering from something?", "recover");
  EXPECT_EQ(q, (QasrlQuestion{"How long", "was", "someone", "recovering", "", "from",
                              "something"}));
}

TEST(ParseQuestionTest, NormalizesWhitespace) {
  QasrlQuestion q = Grammar().Parse("  Who   shot someone? ", "shoot");
  EXPECT_EQ(RenderQuestion(q), "Who shot someone?");
}

TEST(ParseQuestionTest, RejectsNonTemplateQuestions) {
  try {
    Grammar().Parse("Banana yellow loud?", "be");
    FAIL() << "expected UNPARSEABLE";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnparseable);
    EXPECT_NE(std::string(e.what()).find("Banana"), std::string::npos);
  }
  EXPECT_FALSE(Grammar().TryParse("Who shot someone", "shoot"));
  EXPECT_FALSE(Grammar().TryParse("Who recovered someone?", "shoot"));
  EXPECT_FALSE(Grammar().TryParse("?", "shoot"));
  std::string error;
  EXPECT_FALSE(Grammar().TryParse("Who shot someone banana?", "shoot", &error));
  EXPECT_NE(error.find("banana"), std::string::npos);
}

TEST(RenderQuestionTest, JoinsNonEmptySlots) {
  EXPECT_EQ(RenderQuestion({"Who", "", "", "shot", "someone", "", ""}), "Who shot someone?");
  EXPECT_EQ(RenderQuestion({"Where", "has", "someone", "been recovering", "", "", ""}),
            "Where has someone been recovering?");
}

TEST(MapToRoleTest, RuleTable) {
  EXPECT_EQ(RoleOf("Who shot someone?", "shoot").ToString(), "SUBJ");
  EXPECT_EQ(RoleOf("Who was shot?", "shoot").ToString(), "OBJ");
  EXPECT_EQ(RoleOf("Where has someone been recovering?", "recover").ToString(),
            "ADJUNCT(where)");
  EXPECT_EQ(RoleOf("How long was someone recovering from something?", "recover")
                .ToString(),
            "ADJUNCT(how long)");
  EXPECT_EQ(RoleOf("How much would someone acquire something for?", "acquire")
                .ToString(),
            "ADJUNCT(how much)");
  EXPECT_EQ(RoleOf("What did someone give someone?", "give").ToString(), "OBJ2");
  EXPECT_EQ(RoleOf("Who did someone give something to?", "give").ToString(),
            "PREP-OBJ(to)");
  EXPECT_EQ(RoleOf("What did someone confront with?", "confront").ToString(), "OBJ");
}

TEST(MapToRoleTest, PassiveDetection) {
  EXPECT_TRUE(Grammar().IsPassive(Grammar().Parse("Who was shot?", "shoot")));
  EXPECT_TRUE(Grammar().IsPassive(Grammar().Parse("What was being renovated?", "renovate")));
  EXPECT_TRUE(Grammar().IsPassive(Grammar().Parse("What will be closed?", "close")));
  EXPECT_FALSE(Grammar().IsPassive(Grammar().Parse("Who has shot someone?", "shoot")));
  EXPECT_FALSE(
      Grammar().IsPassive(Grammar().Parse("Who was recovering from something?", "recover")));
}

TEST(EquivalenceTest, Examples) {
  const QuestionGrammar &g = Grammar();
  QasrlQuestion subj = g.Parse("Who shot someone?", "shoot");
  QasrlQuestion obj = g.Parse("Who was shot?", "shoot");
  EXPECT_TRUE(g.Equivalent(subj, subj));
  EXPECT_FALSE(g.Equivalent(subj, obj));
  EXPECT_TRUE(g.Equivalent(g.Parse("What was someone recovering from?", "recover"),
                           g.Parse("What did someone recover from?", "recover")));
}

TEST(EquivalenceTest, IsAnEquivalenceRelation) {
  const QuestionGrammar &g = Grammar();
  std::vector<QasrlQuestion> questions;
  for (const char *text :
       {"Who shot someone?", "Who was shot?", "When was someone shot?", "What shot someone?",
        "Who did someone shoot?", "When did someone shoot someone?", "Who might shoot?",
        "Where was someone shot?", "Who shot someone with something?"}) {
    questions.push_back(g.Parse(text, "shoot"));
  }
  for (const auto &a : questions) {
    EXPECT_TRUE(g.Equivalent(a, a));
    for (const auto &b : questions) {
      EXPECT_EQ(g.Equivalent(a, b), g.Equivalent(b, a));
      for (const auto &c : questions) {
        if (g.Equivalent(a, b) && g.Equivalent(b, c)) EXPECT_TRUE(g.Equivalent(a, c));
      }
    }
  }
}

// Enumerates template instances and checks parse(render(q)) = q.
TEST(ParseQuestionTest, RoundTripOverGeneratedQuestions) {
  const QuestionGrammar &g = Grammar();
  const Inflections &inflections = g.inflections();
  const std::vector<std::string> whs = {"What", "Who", "When", "Where", "How", "Why",
                                        "How long", "How much"};
  const std::vector<std::string> subjs = {"", "someone", "something"};
  const std::vector<std::string> objs = {"", "someone", "something"};
  const std::vector<std::string> preps = {"", "to", "with", "from", "about", "for"};
  const std::vector<std::string> obj2s = {"", "someone", "something", "somewhere"};
  int checked = 0;
  for (const char *base : {"give", "shoot", "recover", "stop"}) {
    VerbForms forms = inflections.Forms(base);
    // (aux, verb) pairs that are grammatical with and without a subject.
    std::vector<std::pair<std::string, std::string>> groups = {
        {"", forms.past},
        {"did", forms.base},
        {"was", forms.past_participle},
        {"has", "been " + forms.present_participle},
        {"might", "not " + forms.base},
        {"will", "be " + forms.past_participle},
    };
    for (const auto &wh : whs) {
      for (const auto &[aux, verb] : groups) {
        for (const auto &subj : subjs) {
          if (aux.empty() && !subj.empty()) continue;
          for (const auto &obj1 : objs) {
            for (const auto &prep : preps) {
              for (const auto &obj2 : obj2s) {
                if (prep.empty() && obj1.empty() && !obj2.empty()) continue;
                QasrlQuestion q{wh, aux, subj, verb, obj1, prep, obj2};
                std::string text = RenderQuestion(q);
                std::string error;
                auto parsed = g.TryParse(text, base, &error);
                ASSERT_TRUE(parsed) << text << ": " << error;
                EXPECT_EQ(*parsed, q) << text;
                EXPECT_EQ(RenderQuestion(*parsed), text);
                ++checked;
              }
            }
          }
        }
      }
    }
  }
  EXPECT_GT(checked, 10000);
}

TEST(DiscoursePrefixTest, TableExamples) {
  auto prefixes = Prefixes();
  PrefixMatch m = MatchDiscoursePrefix("While what were both shot?", prefixes);
  EXPECT_EQ(m.prefix.surface, "While what");
  EXPECT_EQ(m.body, "were both shot?");
  m = MatchDiscoursePrefix("Since when have both been recovering in hospital?", prefixes);
  EXPECT_EQ(m.prefix.surface, "Since when");
  EXPECT_EQ(m.body, "have both been recovering in hospital?");
}

TEST(DiscoursePrefixTest, NoPrefix) {
  try {
    MatchDiscoursePrefix("Purple monkeys?", Prefixes());
    FAIL() << "expected NO_PREFIX";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoPrefix);
  }
  EXPECT_FALSE(FindDiscoursePrefix("Purple monkeys?", Prefixes()));
  EXPECT_THROW(MatchDiscoursePrefix("While what?", {}), Error);
}

TEST(DiscoursePrefixTest, FirstCharacterCaseInsensitive) {
  auto prefixes = Prefixes();
  EXPECT_EQ(MatchDiscoursePrefix("while what were both shot?", prefixes).prefix.surface,
            "While what");
  EXPECT_FALSE(FindDiscoursePrefix("WHILE WHAT were both shot?", prefixes));
}

TEST(DiscoursePrefixTest, WordBoundary) {
  EXPECT_FALSE(FindDiscoursePrefix("While whatever happened?", Prefixes()));
}

TEST(DiscoursePrefixTest, LongestPrefixWins) {
  auto inventory = LoadDiscoursePrefixes(
      "What is\tA\nWhat is the reason\tB\nWhat is the\tC\n");
  PrefixMatch m = MatchDiscoursePrefix("What is the reason the match stopped?", inventory);
  EXPECT_EQ(m.prefix.surface, "What is the reason");
  EXPECT_EQ(m.body, "the match stopped?");
  EXPECT_EQ(MatchDiscoursePrefix("What is the cause?", inventory).prefix.surface,
            "What is the");
}

TEST(DiscoursePrefixTest, InventoryValidation) {
  EXPECT_THROW(LoadDiscoursePrefixes("While what\tX\nWhile what\tY\n"), Error);
  EXPECT_THROW(LoadDiscoursePrefixes("While what\t\n"), Error);
  auto prefixes = Prefixes();
  EXPECT_GE(prefixes.size(), 4u);
  for (const char *attested : {"In what case", "After what", "Since when", "While what"}) {
    EXPECT_TRUE(std::any_of(prefixes.begin(), prefixes.end(),
                            [&](const DiscoursePrefix &p) { return p.surface == attested; }))
        << attested;
  }
}

}  // namespace
}  // namespace qasem
