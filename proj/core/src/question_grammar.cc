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

#include <algorithm>
#include <functional>

#include "qasem/common.h"

namespace qasem {
namespace {

bool IsVowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

int VowelGroups(std::string_view word) {
  int groups = 0;
  bool in_group = false;
  for (char c : word) {
    bool vowel = IsVowel(c);
    if (vowel && !in_group) ++groups;
    in_group = vowel;
  }
  return groups;
}

// Monosyllabic consonant-vowel-consonant ending, e.g. "stop", "plan".
bool EndsShortSyllable(std::string_view word) {
  size_t n = word.size();
  if (n < 2) return false;
  char last = word[n - 1];
  if (IsVowel(last) || last == 'w' || last == 'x' || last == 'y') return false;
  if (!IsVowel(word[n - 2])) return false;
  if (n >= 3 && IsVowel(word[n - 3])) return false;
  return VowelGroups(word) == 1;
}

bool ShouldDouble(std::string_view word) {
  return word.size() >= 3 && EndsShortSyllable(word);
}

// Forms of "be" beyond the five table columns.
const std::set<std::string> &ExtraBeForms() {
  static const std::set<std::string> forms = {"am", "are", "were"};
  return forms;
}

const std::set<std::string> &PassiveAuxiliaries() {
  static const std::set<std::string> forms = {
      "be",     "is",      "are",     "am",      "was",     "were",
      "been",   "being",   "isn't",   "aren't",  "wasn't",  "weren't",
      "get",    "gets",    "got",     "gotten",  "getting"};
  return forms;
}

const std::set<std::string> &AdjunctWhWords() {
  static const std::set<std::string> words = {"when", "where", "why",
                                              "how",  "how long", "how much"};
  return words;
}

}  // namespace

VerbForms RegularVerbForms(std::string_view base_view) {
  std::string base = ToLower(base_view);
  VerbForms forms;
  forms.base = base;
  if (base.empty()) return forms;
  size_t n = base.size();
  char last = base[n - 1];
  bool consonant_y = last == 'y' && n >= 2 && !IsVowel(base[n - 2]);

  if (EndsWith(base, "s") || EndsWith(base, "x") || EndsWith(base, "z") ||
      EndsWith(base, "ch") || EndsWith(base, "sh") || EndsWith(base, "o")) {
    forms.third_singular = base + "es";
  } else if (consonant_y) {
    forms.third_singular = base.substr(0, n - 1) + "ies";
  } else {
    forms.third_singular = base + "s";
  }

  if (last == 'e') {
    forms.past = base + "d";
  } else if (consonant_y) {
    forms.past = base.substr(0, n - 1) + "ied";
  } else if (ShouldDouble(base)) {
    forms.past = base + last + "ed";
  } else {
    forms.past = base + "ed";
  }
  forms.past_participle = forms.past;

  if (EndsWith(base, "ie")) {
    forms.present_participle = base.substr(0, n - 2) + "ying";
  } else if (last == 'e' && !EndsWith(base, "ee") && !EndsWith(base, "ye") &&
             !EndsWith(base, "oe") && n > 2) {
    forms.present_participle = base.substr(0, n - 1) + "ing";
  } else if (ShouldDouble(base)) {
    forms.present_participle = base + last + "ing";
  } else {
    forms.present_participle = base + "ing";
  }
  return forms;
}

Inflections Inflections::FromTsv(const std::string &content) {
  Inflections inflections;
  for (const auto &row : ParseTsvResource(content, 5, "inflections")) {
    inflections.Add({ToLower(row[0]), ToLower(row[1]), ToLower(row[2]),
                     ToLower(row[3]), ToLower(row[4])});
  }
  return inflections;
}

void Inflections::Add(const VerbForms &forms) {
  table_[forms.base] = forms;
  known_bases_.insert(forms.base);
  for (const std::string *form :
       {&forms.past, &forms.past_participle, &forms.present_participle,
        &forms.third_singular}) {
    lemma_of_.emplace(*form, forms.base);
  }
  past_participles_.insert(forms.past_participle);
  if (forms.base == "be") {
    for (const auto &form : ExtraBeForms()) lemma_of_.emplace(form, "be");
  }
}

void Inflections::AddKnownBase(const std::string &base) {
  known_bases_.insert(ToLower(base));
}

VerbForms Inflections::Forms(std::string_view base) const {
  auto it = table_.find(ToLower(base));
  if (it != table_.end()) return it->second;
  return RegularVerbForms(base);
}

bool Inflections::IsInflectionOf(std::string_view base_view,
                                 std::string_view token_view) const {
  std::string base = ToLower(base_view);
  std::string token = ToLower(token_view);
  if (base.empty() || token.empty()) return false;
  if (token == base) return true;
  VerbForms forms = Forms(base);
  if (token == forms.past || token == forms.past_participle ||
      token == forms.present_participle || token == forms.third_singular) {
    return true;
  }
  if (base == "be") return ExtraBeForms().count(token) > 0;
  if (table_.count(base) > 0) return false;

  // Spelling variants the suffix rules may not predict (doubling, e-drop).
  char last = base.back();
  std::string doubled = base + last;
  std::string stem = last == 'e' ? base.substr(0, base.size() - 1) : base;
  for (const std::string &variant :
       {base + "ed", base + "ing", base + "s", base + "es", doubled + "ed",
        doubled + "ing", stem + "ed", stem + "ing"}) {
    if (token == variant) return true;
  }
  return false;
}

bool Inflections::IsPastParticiple(std::string_view token_view) const {
  std::string token = ToLower(token_view);
  if (past_participles_.count(token) > 0) return true;
  auto it = lemma_of_.find(token);
  if (it != lemma_of_.end()) return false;
  return token.size() > 3 && (EndsWith(token, "ed") || EndsWith(token, "en"));
}

bool Inflections::IsKnownBase(std::string_view base) const {
  return known_bases_.count(ToLower(base)) > 0;
}

std::string Inflections::Lemmatize(std::string_view token_view) const {
  std::string token = ToLower(token_view);
  if (known_bases_.count(token) > 0) return token;
  auto it = lemma_of_.find(token);
  if (it != lemma_of_.end()) return it->second;

  // Candidate stems, most plausible first.
  std::vector<std::string> candidates;
  auto add_stem = [&](const std::string &stem, bool prefer_e) {
    if (stem.empty()) return;
    std::string with_e = stem + "e";
    bool wants_e = prefer_e && (EndsShortSyllable(stem) ||
                                EndsWith(stem, "v") || EndsWith(stem, "c") ||
                                (EndsWith(stem, "z") && !EndsWith(stem, "zz")) ||
                                (stem.size() >= 3 && EndsWith(stem, "at") &&
                                 !IsVowel(stem[stem.size() - 3])));
    if (wants_e) {
      candidates.push_back(with_e);
      candidates.push_back(stem);
    } else {
      candidates.push_back(stem);
      if (prefer_e) candidates.push_back(with_e);
    }
    size_t n = stem.size();
    if (n >= 3 && stem[n - 1] == stem[n - 2] && !IsVowel(stem[n - 1])) {
      candidates.push_back(stem.substr(0, n - 1));
    }
  };
  if (EndsWith(token, "ing") && token.size() > 4) {
    std::string stem = token.substr(0, token.size() - 3);
    if (EndsWith(stem, "y") && stem.size() >= 2 &&
        !IsVowel(stem[stem.size() - 2]) && stem.size() <= 2) {
      candidates.push_back(stem.substr(0, stem.size() - 1) + "ie");
    }
    add_stem(stem, true);
  } else if (EndsWith(token, "ied") && token.size() > 4) {
    candidates.push_back(token.substr(0, token.size() - 3) + "y");
  } else if (EndsWith(token, "ed") && token.size() > 3) {
    add_stem(token.substr(0, token.size() - 2), true);
  } else if (EndsWith(token, "ies") && token.size() > 4) {
    candidates.push_back(token.substr(0, token.size() - 3) + "y");
  } else if (EndsWith(token, "es") && token.size() > 3) {
    candidates.push_back(token.substr(0, token.size() - 2));
    candidates.push_back(token.substr(0, token.size() - 1));
  } else if (EndsWith(token, "s") && !EndsWith(token, "ss") &&
             token.size() > 2) {
    candidates.push_back(token.substr(0, token.size() - 1));
  }

  for (const auto &candidate : candidates) {
    if (known_bases_.count(candidate) > 0) return candidate;
  }
  for (const auto &candidate : candidates) {
    VerbForms forms = Forms(candidate);
    if (forms.past == token || forms.present_participle == token ||
        forms.third_singular == token) {
      return candidate;
    }
  }
  return candidates.empty() ? token : candidates.front();
}

SlotInventories SlotInventories::Default(const std::string &prepositions_txt) {
  SlotInventories inv;
  inv.wh_words = {"what", "who", "when", "where", "how", "why"};
  inv.compound_wh_words = {"how long", "how much"};
  inv.auxiliaries = {
      "do",      "does",     "did",      "is",       "are",      "was",
      "were",    "am",       "has",      "have",     "had",      "will",
      "would",   "can",      "could",    "may",      "might",    "must",
      "should",  "shall",    "don't",    "doesn't",  "didn't",   "isn't",
      "aren't",  "wasn't",   "weren't",  "hasn't",   "haven't",  "hadn't",
      "won't",   "wouldn't", "can't",    "cannot",   "couldn't", "mightn't",
      "mustn't", "shouldn't"};
  inv.placeholders = {"someone", "something", "somewhere"};
  inv.obj2_extras = {"do", "doing", "do something", "doing something"};
  inv.verb_prefixes = {"not", "be", "been", "being", "have", "having"};
  for (const auto &row : ParseTsvResource(prepositions_txt, 1, "prepositions")) {
    inv.prepositions.insert(NormalizeWhitespace(ToLower(row[0])));
  }
  return inv;
}

int SlotInventories::WhRank(std::string_view wh) const {
  std::string lower = ToLower(NormalizeWhitespace(wh));
  for (size_t i = 0; i < wh_words.size(); ++i) {
    if (wh_words[i] == lower) return static_cast<int>(i);
  }
  for (const auto &compound : compound_wh_words) {
    if (compound == lower) return WhRank(SplitWhitespace(compound).front());
  }
  return static_cast<int>(wh_words.size());
}

bool SlotInventories::IsWh(std::string_view wh) const {
  std::string lower = ToLower(NormalizeWhitespace(wh));
  return std::find(wh_words.begin(), wh_words.end(), lower) != wh_words.end() ||
         std::find(compound_wh_words.begin(), compound_wh_words.end(), lower) !=
             compound_wh_words.end();
}

std::string RenderQuestion(const QasrlQuestion &q) {
  std::vector<std::string> parts;
  for (const std::string *slot :
       {&q.wh, &q.aux, &q.subj, &q.verb, &q.obj1, &q.prep, &q.obj2}) {
    if (!slot->empty()) parts.push_back(*slot);
  }
  return Join(parts, " ") + "?";
}

std::string SyntacticRole::ToString() const {
  switch (kind) {
    case Kind::kSubj: return "SUBJ";
    case Kind::kObj: return "OBJ";
    case Kind::kObj2: return "OBJ2";
    case Kind::kPrepObj: return "PREP-OBJ(" + qualifier + ")";
    case Kind::kAdjunct: return "ADJUNCT(" + qualifier + ")";
  }
  return "?";
}

std::vector<DiscoursePrefix> LoadDiscoursePrefixes(const std::string &tsv) {
  std::vector<DiscoursePrefix> inventory;
  std::set<std::string> seen;
  for (const auto &row : ParseTsvResource(tsv, 2, "discourse_prefixes")) {
    DiscoursePrefix prefix{NormalizeWhitespace(row[0]), row[1]};
    if (prefix.surface.empty() || prefix.sense.empty()) {
      throw Error(ErrorCode::kSchema,
                  "discourse prefix with empty surface or sense");
    }
    if (!seen.insert(prefix.surface).second) {
      throw Error(ErrorCode::kSchema,
                  "duplicate discourse prefix '" + prefix.surface + "'");
    }
    inventory.push_back(std::move(prefix));
  }
  return inventory;
}

std::optional<PrefixMatch> FindDiscoursePrefix(
    std::string_view text_view, const std::vector<DiscoursePrefix> &inventory) {
  std::string text = NormalizeWhitespace(text_view);
  const DiscoursePrefix *best = nullptr;
  for (const auto &prefix : inventory) {
    const std::string &surface = prefix.surface;
    if (surface.empty() || text.size() < surface.size()) continue;
    if (std::tolower(static_cast<unsigned char>(text[0])) !=
        std::tolower(static_cast<unsigned char>(surface[0]))) {
      continue;
    }
    if (text.compare(1, surface.size() - 1, surface, 1) != 0) continue;
    if (text.size() > surface.size()) {
      char next = text[surface.size()];
      if (next != ' ' && next != '?' && next != ',') continue;
    }
    if (best == nullptr || surface.size() > best->surface.size()) {
      best = &prefix;
    }
  }
  if (best == nullptr) return std::nullopt;
  return PrefixMatch{*best, Trim(text.substr(best->surface.size()))};
}

PrefixMatch MatchDiscoursePrefix(
    std::string_view text, const std::vector<DiscoursePrefix> &inventory) {
  if (inventory.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty discourse prefix inventory");
  }
  auto match = FindDiscoursePrefix(text, inventory);
  if (!match) {
    throw Error(ErrorCode::kNoPrefix,
                "no discourse prefix matches '" + std::string(text) + "'");
  }
  return *match;
}

QuestionGrammar::QuestionGrammar(SlotInventories inventories,
                                 Inflections inflections)
    : inventories_(std::move(inventories)),
      inflections_(std::move(inflections)) {
  for (const auto &prep : inventories_.prepositions) {
    max_prep_words_ = std::max(max_prep_words_, SplitWhitespace(prep).size());
  }
  for (const auto &extra : inventories_.obj2_extras) {
    max_prep_words_ = std::max(max_prep_words_, SplitWhitespace(extra).size());
  }
}

QuestionGrammar QuestionGrammar::FromResources(const ResourceBundle &resources) {
  return QuestionGrammar(SlotInventories::Default(resources.prepositions),
                         Inflections::FromTsv(resources.inflections));
}

const QuestionGrammar &QuestionGrammar::Default() {
  static const QuestionGrammar grammar = FromResources(BundledResources());
  return grammar;
}

namespace {

// Backtracking matcher over the seven template slots.
class SlotMatcher {
 public:
  SlotMatcher(const SlotInventories &inv, const Inflections &inflections,
              std::string_view verb_form, size_t max_words,
              const std::vector<std::string> &tokens)
      : inv_(inv),
        inflections_(inflections),
        verb_form_(verb_form),
        max_words_(max_words),
        tokens_(tokens) {
    for (const auto &token : tokens) lower_.push_back(ToLower(token));
  }

  bool Match(QasrlQuestion *out) { return MatchSlot(0, 0, out); }

  size_t furthest() const { return furthest_; }

 private:
  std::string Span(size_t begin, size_t end) const {
    std::vector<std::string> parts(tokens_.begin() + begin,
                                   tokens_.begin() + end);
    return Join(parts, " ");
  }

  std::string LowerSpan(size_t begin, size_t end) const {
    std::vector<std::string> parts(lower_.begin() + begin, lower_.begin() + end);
    return Join(parts, " ");
  }

  // Lengths of closed-class entries matching at `pos`, longest first.
  std::vector<size_t> SetMatches(const std::set<std::string> &set, size_t pos,
                                 size_t max_words) const {
    std::vector<size_t> lengths;
    for (size_t len = std::min(max_words, tokens_.size() - pos); len >= 1;
         --len) {
      if (set.count(LowerSpan(pos, pos + len)) > 0) lengths.push_back(len);
    }
    return lengths;
  }

  std::vector<size_t> Candidates(int slot, size_t pos) const {
    std::vector<size_t> lengths;
    if (pos >= tokens_.size()) return lengths;
    switch (slot) {
      case 0:  // WH
        if (pos + 1 < tokens_.size()) {
          std::string two = LowerSpan(pos, pos + 2);
          for (const auto &wh : inv_.compound_wh_words) {
            if (wh == two) lengths.push_back(2);
          }
        }
        if (std::find(inv_.wh_words.begin(), inv_.wh_words.end(),
                      lower_[pos]) != inv_.wh_words.end()) {
          lengths.push_back(1);
        }
        break;
      case 1:  // AUX
        if (inv_.auxiliaries.count(lower_[pos]) > 0) lengths.push_back(1);
        break;
      case 2:  // SUBJ
      case 4:  // OBJ1
        if (inv_.placeholders.count(lower_[pos]) > 0) lengths.push_back(1);
        break;
      case 3: {  // VERB: optional prefixes followed by an inflected verb
        size_t end = pos;
        std::vector<size_t> found;
        while (end < tokens_.size()) {
          if (inflections_.IsInflectionOf(verb_form_, lower_[end])) {
            found.push_back(end + 1 - pos);
          }
          if (inv_.verb_prefixes.count(lower_[end]) == 0) break;
          ++end;
        }
        lengths.assign(found.rbegin(), found.rend());
        break;
      }
      case 5:  // PREP
        lengths = SetMatches(inv_.prepositions, pos, max_words_);
        break;
      case 6: {  // OBJ2
        std::set<std::string> fillers = inv_.placeholders;
        fillers.insert(inv_.obj2_extras.begin(), inv_.obj2_extras.end());
        lengths = SetMatches(fillers, pos, max_words_);
        break;
      }
    }
    return lengths;
  }

  static std::string *Slot(QasrlQuestion *q, int slot) {
    switch (slot) {
      case 0: return &q->wh;
      case 1: return &q->aux;
      case 2: return &q->subj;
      case 3: return &q->verb;
      case 4: return &q->obj1;
      case 5: return &q->prep;
      default: return &q->obj2;
    }
  }

  bool MatchSlot(int slot, size_t pos, QasrlQuestion *q) {
    furthest_ = std::max(furthest_, pos);
    if (slot == 7) return pos == tokens_.size();
    std::string *value = Slot(q, slot);
    for (size_t len : Candidates(slot, pos)) {
      *value = Span(pos, pos + len);
      if (MatchSlot(slot + 1, pos + len, q)) return true;
    }
    value->clear();
    // WH and VERB are mandatory.
    if (slot == 0 || slot == 3) return false;
    return MatchSlot(slot + 1, pos, q);
  }

  const SlotInventories &inv_;
  const Inflections &inflections_;
  std::string verb_form_;
  size_t max_words_;
  const std::vector<std::string> &tokens_;
  std::vector<std::string> lower_;
  size_t furthest_ = 0;
};

}  // namespace

std::optional<QasrlQuestion> QuestionGrammar::TryParse(
    std::string_view text_view, std::string_view verb_form,
    std::string *error) const {
  auto fail = [&](const std::string &reason) -> std::optional<QasrlQuestion> {
    if (error != nullptr) *error = reason;
    return std::nullopt;
  };
  std::string text = NormalizeWhitespace(text_view);
  if (!EndsWith(text, "?")) return fail("question does not end with '?'");
  if (Trim(verb_form).empty()) return fail("empty verb form");
  text.pop_back();
  std::vector<std::string> tokens = SplitWhitespace(text);
  if (tokens.empty()) return fail("empty question");

  SlotMatcher matcher(inventories_, inflections_, Trim(verb_form),
                      max_prep_words_, tokens);
  QasrlQuestion question;
  if (matcher.Match(&question)) return question;

  size_t at = matcher.furthest();
  if (at >= tokens.size()) {
    return fail("incomplete question at end of text");
  }
  return fail("cannot fill template at token '" + tokens[at] + "' (position " +
              std::to_string(at) + ")");
}

QasrlQuestion QuestionGrammar::Parse(std::string_view text,
                                     std::string_view verb_form) const {
  std::string error;
  auto question = TryParse(text, verb_form, &error);
  if (!question) {
    throw Error(ErrorCode::kUnparseable,
                "'" + std::string(text) + "': " + error);
  }
  return *question;
}

bool QuestionGrammar::IsValid(const QasrlQuestion &q) const {
  if (!inventories_.IsWh(q.wh) || Trim(q.verb).empty()) return false;
  auto in = [](const std::set<std::string> &set, const std::string &value) {
    return value.empty() || set.count(ToLower(value)) > 0;
  };
  std::set<std::string> obj2 = inventories_.placeholders;
  obj2.insert(inventories_.obj2_extras.begin(), inventories_.obj2_extras.end());
  return in(inventories_.auxiliaries, q.aux) &&
         in(inventories_.placeholders, q.subj) &&
         in(inventories_.placeholders, q.obj1) &&
         in(inventories_.prepositions, q.prep) && in(obj2, q.obj2);
}

bool QuestionGrammar::IsPassive(const QasrlQuestion &q) const {
  std::vector<std::string> chain;
  if (!q.aux.empty()) chain.push_back(ToLower(q.aux));
  for (const auto &token : SplitWhitespace(q.verb)) {
    chain.push_back(ToLower(token));
  }
  if (chain.size() < 2) return false;
  const std::string &main_verb = chain.back();
  // Nearest auxiliary before the main verb, skipping negation.
  for (size_t i = chain.size() - 1; i-- > 0;) {
    if (chain[i] == "not") continue;
    return PassiveAuxiliaries().count(chain[i]) > 0 &&
           inflections_.IsPastParticiple(main_verb);
  }
  return false;
}

SyntacticRole QuestionGrammar::MapToRole(const QasrlQuestion &q) const {
  using Kind = SyntacticRole::Kind;
  std::string wh = ToLower(NormalizeWhitespace(q.wh));
  if (AdjunctWhWords().count(wh) > 0) return {Kind::kAdjunct, wh};
  bool passive = IsPassive(q);
  if (q.subj.empty() && !passive) return {Kind::kSubj, ""};
  if (passive && q.obj1.empty()) return {Kind::kObj, ""};
  if (q.obj1.empty()) return {Kind::kObj, ""};
  if (!q.prep.empty()) return {Kind::kPrepObj, ToLower(q.prep)};
  return {Kind::kObj2, ""};
}

}  // namespace qasem
