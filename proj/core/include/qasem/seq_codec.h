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

#ifndef QASEM_SEQ_CODEC_H_
#define QASEM_SEQ_CODEC_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qasem/common.h"
#include "qasem/question_grammar.h"

namespace qasem {

inline constexpr int kUnaligned = -1;

// An answer surface string and, when aligned, its token span [start, end).
struct AnswerSpan {
  std::string text;
  int start_token = kUnaligned;
  int end_token = kUnaligned;

  bool aligned() const { return start_token != kUnaligned; }
  bool operator==(const AnswerSpan &) const = default;
};

struct QAPair {
  std::string question;
  std::vector<AnswerSpan> answers;

  bool operator==(const QAPair &) const = default;
};

// Output delimiters. Each includes its surrounding single spaces.
inline constexpr std::string_view kQaSeparator = " </qa> ";
inline constexpr std::string_view kQuestionSeparator = " </q> ";
inline constexpr std::string_view kAnswerSeparator = " </a> ";

struct LinearizationStrategy {
  enum class Kind { kRandomOrder, kRoleOrder, kAnswerOrder };
  Kind kind = Kind::kRoleOrder;
  uint64_t seed = 0;  // kRandomOrder only
};

struct PermutationScheme {
  enum class Kind { kAll, kFixed, kLinear };
  Kind kind = Kind::kAll;
  size_t max_permutations = 10;  // cap M for kAll
  size_t count = 3;              // k for kFixed
  uint64_t seed = 0;
};

struct InputEncodingConfig {
  enum class MarkerMode { kAppendTarget, kMarkerBefore, kMarkerAfter, kMarkerBoth };

  std::string task_prefix = "parse: ";
  MarkerMode marker_mode = MarkerMode::kMarkerBoth;
  std::string marker_token = "[PREDICATE]";
  std::string sep_token = "[SEP]";
  bool append_verb_form = true;

  static InputEncodingConfig Discourse() {
    InputEncodingConfig cfg;
    cfg.task_prefix = "parse discourse: ";
    return cfg;
  }
};

// Builds a predicate-level model input. With the defaults the result is
//   "parse: " + tokens with [PREDICATE] around the target + " [SEP] " + verb
// Throws Error(kMarkerCollision) if a marker or separator occurs in the
// sentence, Error(kInvalidArgument) if the index is out of range.
std::string EncodeInput(const std::vector<std::string> &tokens,
                        int predicate_index, std::string_view verb_form,
                        const InputEncodingConfig &cfg = {});

// Sentence-level input for the discourse task: prefix + raw sentence.
std::string EncodeSentenceInput(const std::vector<std::string> &tokens,
                                const InputEncodingConfig &cfg =
                                    InputEncodingConfig::Discourse());

// Returns a permutation of `qas`. Throws Error(kUnalignedAnswer) for
// kAnswerOrder when a first answer is unaligned.
std::vector<QAPair> OrderQas(std::vector<QAPair> qas,
                             const LinearizationStrategy &strategy,
                             const SlotInventories &inventories =
                                 QuestionGrammar::Default().inventories());

// Index permutations of [0, n) per the augmentation scheme.
std::vector<std::vector<size_t>> PermutationIndices(
    size_t n, const PermutationScheme &scheme);

std::vector<std::vector<QAPair>> PermuteAugment(const std::vector<QAPair> &qas,
                                                const PermutationScheme &scheme);

// Joins QAs with the output grammar:
//   output  := "" | qa (" </qa> " qa)*
//   qa      := question " </q> " answers
//   answers := answer (" </a> " answer)*
// Throws Error(kDelimiterCollision) if any text contains a delimiter tag.
std::string LinearizeOutput(const std::vector<QAPair> &qas, Task task);

enum class DiagnosticKind {
  kMalformedSequence,
  kUnalignableAnswer,
  kUnparseableQuestion,
  kNoPrefix,
};

const char *DiagnosticKindName(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind;
  // Offending fragment (sequence piece, answer text, or question).
  std::string fragment;
  std::string detail;
  // Index of the recovered QA the diagnostic refers to, or -1.
  int qa_index = -1;
};

struct DelinearizeOptions {
  // When set, qasrl/qanom questions are validated against the grammar.
  const QuestionGrammar *grammar = nullptr;
  std::string verb_form;
  // When set, discourse questions are checked for a known prefix.
  const std::vector<DiscoursePrefix> *prefixes = nullptr;
};

struct DelinearizeResult {
  std::vector<QAPair> qas;
  std::vector<Diagnostic> diagnostics;
};

// Best-effort inverse of LinearizeOutput over arbitrary model output. Never
// throws: malformed fragments, unalignable answers and unparseable questions
// are reported as diagnostics. Unalignable answers stay in the result with
// an unaligned span.
DelinearizeResult DelinearizeOutput(std::string_view sequence,
                                    const std::vector<std::string> &tokens,
                                    Task task,
                                    const DelinearizeOptions &options = {});

// Leftmost token span whose space-joined, case-folded form equals the
// whitespace-normalized answer; unaligned when there is none.
AnswerSpan AlignAnswer(std::string_view answer_text,
                       const std::vector<std::string> &tokens);

// Checks that an aligned span re-renders from the sentence tokens.
bool SpanMatchesTokens(const AnswerSpan &span,
                       const std::vector<std::string> &tokens);

}  // namespace qasem

#endif  // QASEM_SEQ_CODEC_H_
