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

#include "qasem/seq_codec.h"

#include <algorithm>
#include <numeric>
#include <set>

namespace qasem {
namespace {

constexpr std::string_view kQaTag = "</qa>";
constexpr std::string_view kQuestionTag = "</q>";
constexpr std::string_view kAnswerTag = "</a>";

bool ContainsDelimiter(std::string_view text) {
  return text.find(kQaTag) != std::string_view::npos ||
         text.find(kQuestionTag) != std::string_view::npos ||
         text.find(kAnswerTag) != std::string_view::npos;
}

// WH value of a question: a two-word compound if the grammar knows it,
// otherwise the first word.
std::string LeadingWh(const std::string &question,
                      const SlotInventories &inventories) {
  std::vector<std::string> words = SplitWhitespace(ToLower(question));
  if (words.empty()) return "";
  for (auto &word : words) {
    while (!word.empty() && word.back() == '?') word.pop_back();
  }
  if (words.size() >= 2) {
    std::string two = words[0] + " " + words[1];
    for (const auto &compound : inventories.compound_wh_words) {
      if (compound == two) return two;
    }
  }
  return words[0];
}

// n! saturated at `cap`.
size_t FactorialCapped(size_t n, size_t cap) {
  size_t result = 1;
  for (size_t i = 2; i <= n; ++i) {
    if (result > cap / i) return cap;
    result *= i;
  }
  return std::min(result, cap);
}

std::vector<std::vector<size_t>> SamplePermutations(size_t n, size_t k,
                                                    Random &rng) {
  std::vector<size_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  std::vector<std::vector<size_t>> result;
  result.reserve(k);
  // Distinct orderings while there are enough of them; with replacement
  // otherwise.
  bool distinct = k <= FactorialCapped(n, k + 1);
  std::set<std::vector<size_t>> seen;
  while (result.size() < k) {
    std::vector<size_t> perm = identity;
    rng.Shuffle(perm);
    if (distinct && !seen.insert(perm).second) continue;
    result.push_back(std::move(perm));
  }
  return result;
}

}  // namespace

std::string EncodeInput(const std::vector<std::string> &tokens,
                        int predicate_index, std::string_view verb_form,
                        const InputEncodingConfig &cfg) {
  using Mode = InputEncodingConfig::MarkerMode;
  if (predicate_index < 0 ||
      static_cast<size_t>(predicate_index) >= tokens.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "predicate index " + std::to_string(predicate_index) +
                    " outside sentence of " + std::to_string(tokens.size()) +
                    " tokens");
  }
  for (const auto &token : tokens) {
    if ((!cfg.marker_token.empty() &&
         token.find(cfg.marker_token) != std::string::npos) ||
        (!cfg.sep_token.empty() &&
         token.find(cfg.sep_token) != std::string::npos)) {
      throw Error(ErrorCode::kMarkerCollision,
                  "sentence token '" + token + "' contains a marker");
    }
  }

  std::vector<std::string> parts;
  parts.reserve(tokens.size() + 2);
  for (size_t i = 0; i < tokens.size(); ++i) {
    bool target = static_cast<int>(i) == predicate_index;
    if (target && (cfg.marker_mode == Mode::kMarkerBefore ||
                   cfg.marker_mode == Mode::kMarkerBoth)) {
      parts.push_back(cfg.marker_token);
    }
    parts.push_back(tokens[i]);
    if (target && (cfg.marker_mode == Mode::kMarkerAfter ||
                   cfg.marker_mode == Mode::kMarkerBoth)) {
      parts.push_back(cfg.marker_token);
    }
  }
  std::string out = cfg.task_prefix + Join(parts, " ");
  if (cfg.append_verb_form) {
    out += " " + cfg.sep_token + " " + std::string(verb_form);
  }
  if (cfg.marker_mode == Mode::kAppendTarget) {
    out += " " + cfg.sep_token + " " + tokens[predicate_index];
  }
  return out;
}

std::string EncodeSentenceInput(const std::vector<std::string> &tokens,
                                const InputEncodingConfig &cfg) {
  return cfg.task_prefix + Join(tokens, " ");
}

std::vector<QAPair> OrderQas(std::vector<QAPair> qas,
                             const LinearizationStrategy &strategy,
                             const SlotInventories &inventories) {
  using Kind = LinearizationStrategy::Kind;
  switch (strategy.kind) {
    case Kind::kRandomOrder: {
      Random rng(strategy.seed);
      rng.Shuffle(qas);
      break;
    }
    case Kind::kRoleOrder: {
      std::stable_sort(qas.begin(), qas.end(),
                       [&](const QAPair &a, const QAPair &b) {
                         int ra = inventories.WhRank(LeadingWh(a.question, inventories));
                         int rb = inventories.WhRank(LeadingWh(b.question, inventories));
                         if (ra != rb) return ra < rb;
                         return a.question < b.question;
                       });
      break;
    }
    case Kind::kAnswerOrder: {
      for (const auto &qa : qas) {
        if (qa.answers.empty() || !qa.answers.front().aligned()) {
          throw Error(ErrorCode::kUnalignedAnswer,
                      "answer order needs an aligned first answer for '" +
                          qa.question + "'");
        }
      }
      std::stable_sort(qas.begin(), qas.end(),
                       [](const QAPair &a, const QAPair &b) {
                         int sa = a.answers.front().start_token;
                         int sb = b.answers.front().start_token;
                         if (sa != sb) return sa < sb;
                         return a.question < b.question;
                       });
      break;
    }
  }
  return qas;
}

std::vector<std::vector<size_t>> PermutationIndices(
    size_t n, const PermutationScheme &scheme) {
  using Kind = PermutationScheme::Kind;
  switch (scheme.kind) {
    case Kind::kAll: {
      std::vector<std::vector<size_t>> result;
      std::vector<size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      do {
        if (result.size() >= scheme.max_permutations) break;
        result.push_back(perm);
      } while (std::next_permutation(perm.begin(), perm.end()));
      return result;
    }
    case Kind::kFixed: {
      Random rng(scheme.seed);
      return SamplePermutations(n, scheme.count, rng);
    }
    case Kind::kLinear: {
      Random rng(scheme.seed);
      return SamplePermutations(n, n, rng);
    }
  }
  return {};
}

std::vector<std::vector<QAPair>> PermuteAugment(const std::vector<QAPair> &qas,
                                                const PermutationScheme &scheme) {
  std::vector<std::vector<QAPair>> result;
  for (const auto &perm : PermutationIndices(qas.size(), scheme)) {
    std::vector<QAPair> ordered;
    ordered.reserve(perm.size());
    for (size_t index : perm) ordered.push_back(qas[index]);
    result.push_back(std::move(ordered));
  }
  return result;
}

std::string LinearizeOutput(const std::vector<QAPair> &qas, Task task) {
  std::string out;
  for (size_t i = 0; i < qas.size(); ++i) {
    const QAPair &qa = qas[i];
    std::string question = NormalizeWhitespace(qa.question);
    if (ContainsDelimiter(question)) {
      throw Error(ErrorCode::kDelimiterCollision,
                  "question contains a delimiter: '" + question + "'");
    }
    if (question.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty question");
    }
    if (qa.answers.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "question without answers: '" + question + "'");
    }
    if (task == Task::kDiscourse && qa.answers.size() != 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "discourse QA must have exactly one answer: '" + question +
                      "'");
    }
    if (i > 0) out.append(kQaSeparator);
    out.append(question);
    out.append(kQuestionSeparator);
    for (size_t j = 0; j < qa.answers.size(); ++j) {
      std::string answer = NormalizeWhitespace(qa.answers[j].text);
      if (ContainsDelimiter(answer)) {
        throw Error(ErrorCode::kDelimiterCollision,
                    "answer contains a delimiter: '" + answer + "'");
      }
      if (answer.empty()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "empty answer for '" + question + "'");
      }
      if (j > 0) out.append(kAnswerSeparator);
      out.append(answer);
    }
  }
  return out;
}

const char *DiagnosticKindName(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::kMalformedSequence: return "MALFORMED_SEQUENCE";
    case DiagnosticKind::kUnalignableAnswer: return "UNALIGNABLE_ANSWER";
    case DiagnosticKind::kUnparseableQuestion: return "UNPARSEABLE_QUESTION";
    case DiagnosticKind::kNoPrefix: return "NO_PREFIX";
  }
  return "UNKNOWN";
}

DelinearizeResult DelinearizeOutput(std::string_view sequence,
                                    const std::vector<std::string> &tokens,
                                    Task task,
                                    const DelinearizeOptions &options) {
  DelinearizeResult result;
  std::string normalized = NormalizeWhitespace(sequence);
  if (normalized.empty()) return result;

  auto malformed = [&](const std::string &fragment, const std::string &detail) {
    result.diagnostics.push_back(
        {DiagnosticKind::kMalformedSequence, fragment, detail, -1});
  };

  for (const std::string &raw_piece : SplitString(normalized, kQaTag)) {
    std::string piece = Trim(raw_piece);
    if (piece.empty()) {
      malformed(piece, "empty QA between separators");
      continue;
    }
    std::vector<std::string> halves = SplitString(piece, kQuestionTag);
    if (halves.size() != 2) {
      malformed(piece, halves.size() < 2 ? "missing question separator"
                                         : "repeated question separator");
      continue;
    }
    std::string question = Trim(halves[0]);
    if (question.empty() || !EndsWith(question, "?")) {
      malformed(piece, "question must be non-empty and end with '?'");
      continue;
    }
    QAPair qa;
    qa.question = question;
    bool empty_answer = false;
    for (const std::string &raw_answer : SplitString(halves[1], kAnswerTag)) {
      std::string answer = Trim(raw_answer);
      if (answer.empty()) {
        empty_answer = true;
        continue;
      }
      qa.answers.push_back({answer, kUnaligned, kUnaligned});
    }
    if (qa.answers.empty()) {
      malformed(piece, "no answers");
      continue;
    }
    int qa_index = static_cast<int>(result.qas.size());
    if (empty_answer) {
      result.diagnostics.push_back({DiagnosticKind::kMalformedSequence, piece,
                                    "empty answer dropped", qa_index});
    }
    for (auto &answer : qa.answers) {
      AnswerSpan span = AlignAnswer(answer.text, tokens);
      if (span.aligned()) {
        answer.start_token = span.start_token;
        answer.end_token = span.end_token;
      } else if (IsPredicateTask(task)) {
        result.diagnostics.push_back({DiagnosticKind::kUnalignableAnswer,
                                      answer.text,
                                      "answer is not a sentence span",
                                      qa_index});
      }
    }

    if (IsPredicateTask(task) && options.grammar != nullptr) {
      std::string error;
      if (!options.grammar->TryParse(question, options.verb_form, &error)) {
        result.diagnostics.push_back({DiagnosticKind::kUnparseableQuestion,
                                      question, error, qa_index});
      }
    } else if (task == Task::kDiscourse && options.prefixes != nullptr) {
      if (!FindDiscoursePrefix(question, *options.prefixes)) {
        result.diagnostics.push_back({DiagnosticKind::kNoPrefix, question,
                                      "no known discourse prefix", qa_index});
      }
    }
    result.qas.push_back(std::move(qa));
  }
  return result;
}

AnswerSpan AlignAnswer(std::string_view answer_text,
                       const std::vector<std::string> &tokens) {
  AnswerSpan span{NormalizeWhitespace(answer_text), kUnaligned, kUnaligned};
  std::vector<std::string> words = SplitWhitespace(ToLower(answer_text));
  if (words.empty() || words.size() > tokens.size()) return span;
  std::vector<std::string> lower;
  lower.reserve(tokens.size());
  for (const auto &token : tokens) lower.push_back(ToLower(token));
  for (size_t start = 0; start + words.size() <= lower.size(); ++start) {
    if (std::equal(words.begin(), words.end(), lower.begin() + start)) {
      span.start_token = static_cast<int>(start);
      span.end_token = static_cast<int>(start + words.size());
      return span;
    }
  }
  return span;
}

bool SpanMatchesTokens(const AnswerSpan &span,
                       const std::vector<std::string> &tokens) {
  if (!span.aligned()) return false;
  if (span.start_token < 0 || span.end_token <= span.start_token ||
      static_cast<size_t>(span.end_token) > tokens.size()) {
    return false;
  }
  std::vector<std::string> parts(tokens.begin() + span.start_token,
                                 tokens.begin() + span.end_token);
  return ToLower(Join(parts, " ")) == ToLower(NormalizeWhitespace(span.text));
}

}  // namespace qasem
