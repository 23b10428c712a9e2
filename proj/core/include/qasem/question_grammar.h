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

#ifndef QASEM_QUESTION_GRAMMAR_H_
#define QASEM_QUESTION_GRAMMAR_H_

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qasem/resources.h"

namespace qasem {

// Inflected forms of one verb.
struct VerbForms {
  std::string base;
  std::string past;
  std::string past_participle;
  std::string present_participle;
  std::string third_singular;

  bool operator==(const VerbForms &) const = default;
};

// Applies English suffix rules (e-drop, y->i, final consonant doubling).
VerbForms RegularVerbForms(std::string_view base);

// Verb inflection lookup backed by a table of exceptions, with regular
// morphology for everything else.
class Inflections {
 public:
  Inflections() = default;

  // Parses base<TAB>past<TAB>pastpart<TAB>prespart<TAB>3sg rows.
  static Inflections FromTsv(const std::string &content);

  void Add(const VerbForms &forms);

  // Marks a base form as a known verb for lemmatization without adding
  // exceptional forms.
  void AddKnownBase(const std::string &base);

  VerbForms Forms(std::string_view base) const;

  // True if `token` (case-insensitive) is any inflection of `base`,
  // including the base itself.
  bool IsInflectionOf(std::string_view base, std::string_view token) const;

  // True if `token` is a past participle of some verb.
  bool IsPastParticiple(std::string_view token) const;

  // Best-effort base form for an inflected token.
  std::string Lemmatize(std::string_view token) const;

  bool IsKnownBase(std::string_view base) const;

 private:
  std::unordered_map<std::string, VerbForms> table_;
  std::unordered_map<std::string, std::string> lemma_of_;
  std::unordered_set<std::string> past_participles_;
  std::unordered_set<std::string> known_bases_;
};

// Closed slot vocabularies of the QA-SRL question template.
struct SlotInventories {
  // Role ordering used for sorting: What, Who, When, Where, How, Why.
  std::vector<std::string> wh_words;
  // Two-word WH values, ranked with "how".
  std::vector<std::string> compound_wh_words;
  std::set<std::string> auxiliaries;
  std::set<std::string> placeholders;
  // Extra OBJ2 fillers beyond the placeholders ("do something", ...).
  std::set<std::string> obj2_extras;
  // Tokens that may precede the main verb inside the verb slot.
  std::set<std::string> verb_prefixes;
  // Open class, loaded from a resource file; may contain multi-word entries.
  std::set<std::string> prepositions;

  static SlotInventories Default(const std::string &prepositions_txt);

  // Rank of a WH value in the role ordering; unknown values sort last.
  int WhRank(std::string_view wh) const;
  bool IsWh(std::string_view wh) const;
};

// A QA-SRL question in its seven-slot form. Empty strings denote empty slots.
struct QasrlQuestion {
  std::string wh;
  std::string aux;
  std::string subj;
  std::string verb;
  std::string obj1;
  std::string prep;
  std::string obj2;

  bool operator==(const QasrlQuestion &) const = default;
};

// Joins the non-empty slots with single spaces and appends "?".
std::string RenderQuestion(const QasrlQuestion &question);

struct SyntacticRole {
  enum class Kind { kSubj, kObj, kObj2, kPrepObj, kAdjunct };

  Kind kind = Kind::kSubj;
  // Preposition for kPrepObj, lowercase WH value for kAdjunct.
  std::string qualifier;

  bool operator==(const SyntacticRole &) const = default;
  std::string ToString() const;
};

struct DiscoursePrefix {
  std::string surface;
  std::string sense;

  bool operator==(const DiscoursePrefix &) const = default;
};

// Parses surface<TAB>sense rows; rejects duplicate surfaces and empty senses.
std::vector<DiscoursePrefix> LoadDiscoursePrefixes(const std::string &tsv);

struct PrefixMatch {
  DiscoursePrefix prefix;
  std::string body;
};

// Longest inventory prefix of `text`, compared case-insensitively on the
// first character only. The prefix must end at a word boundary. Throws
// Error(kNoPrefix) when nothing matches.
PrefixMatch MatchDiscoursePrefix(std::string_view text,
                                 const std::vector<DiscoursePrefix> &inventory);

// Non-throwing variant.
std::optional<PrefixMatch> FindDiscoursePrefix(
    std::string_view text, const std::vector<DiscoursePrefix> &inventory);

// Parser, validator and role mapper for the QA-SRL question template.
// Immutable after construction and safe to share across threads.
class QuestionGrammar {
 public:
  QuestionGrammar(SlotInventories inventories, Inflections inflections);

  // Grammar built from the bundled resources.
  static const QuestionGrammar &Default();
  static QuestionGrammar FromResources(const ResourceBundle &resources);

  // Parses `text` against the template, matching the verb slot against the
  // inflections of `verb_form`. Throws Error(kUnparseable) naming the first
  // token that no slot assignment could consume.
  QasrlQuestion Parse(std::string_view text, std::string_view verb_form) const;

  // Same as Parse, but reports failure through `error` instead of throwing.
  std::optional<QasrlQuestion> TryParse(std::string_view text,
                                        std::string_view verb_form,
                                        std::string *error = nullptr) const;

  // Slot-level validity: WH in inventory, non-empty verb, closed-class slots
  // drawn from their inventories.
  bool IsValid(const QasrlQuestion &question) const;

  // Deterministic mapping of a question onto its syntactic role.
  SyntacticRole MapToRole(const QasrlQuestion &question) const;

  bool Equivalent(const QasrlQuestion &a, const QasrlQuestion &b) const {
    return MapToRole(a) == MapToRole(b);
  }

  // True if the auxiliary and verb slots form a be/get passive.
  bool IsPassive(const QasrlQuestion &question) const;

  const SlotInventories &inventories() const { return inventories_; }
  const Inflections &inflections() const { return inflections_; }

 private:
  SlotInventories inventories_;
  Inflections inflections_;
  size_t max_prep_words_ = 1;
};

}  // namespace qasem

#endif  // QASEM_QUESTION_GRAMMAR_H_
