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

#ifndef QASEM_METRICS_H_
#define QASEM_METRICS_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qasem/question_grammar.h"
#include "qasem/seq_codec.h"

namespace qasem {

struct MatchConfig {
  double gamma = 0.3;
  Task mode = Task::kQasrl;

  static MatchConfig ForTask(Task task) {
    return {task == Task::kDiscourse ? 0.5 : 0.3, task};
  }
};

struct AlignedPair {
  int pred = 0;
  int gold = 0;
  double iou = 0.0;

  bool operator==(const AlignedPair &) const = default;
};

struct Alignment {
  std::vector<AlignedPair> pairs;  // sorted by pred index
  std::vector<int> unmatched_pred;
  std::vector<int> unmatched_gold;

  double TotalIou() const;
};

// Lexical tokenization used by IOU: whitespace split, punctuation stripped
// from token edges, case-folded, empty tokens dropped.
std::vector<std::string> LexicalTokens(std::string_view text);

// |a ∩ b| / |a ∪ b| over token sets; 0 when both are empty.
double TokenIou(const std::set<std::string> &a, const std::set<std::string> &b);
double TokenIou(std::string_view a, std::string_view b);

// Token set a QA contributes to matching. Predicate tasks use the union of
// all answers; discourse uses question body (prefix removed) plus answer.
std::set<std::string> MatchTokens(const QAPair &qa, Task mode,
                                  const std::vector<DiscoursePrefix> *prefixes);

// Pairwise IOU matrix, rows = predictions.
std::vector<std::vector<double>> IouMatrix(
    const std::vector<QAPair> &pred, const std::vector<QAPair> &gold,
    const MatchConfig &cfg, const std::vector<DiscoursePrefix> *prefixes = nullptr);

// Maximum-cardinality matching over edges with IOU >= gamma; among those,
// maximal total IOU; remaining ties broken toward the lexicographically
// smallest assignment (pred 0 first, lowest gold index first).
Alignment AlignFromMatrix(const std::vector<std::vector<double>> &iou,
                          double gamma);

Alignment AlignQaSets(const std::vector<QAPair> &pred,
                      const std::vector<QAPair> &gold, const MatchConfig &cfg,
                      const std::vector<DiscoursePrefix> *prefixes = nullptr);

// Brute-force reference over all injective assignments, same objective and
// tie-breaking. Throws Error(kSizeLimit) above 8 QAs per side.
Alignment AlignFromMatrixExhaustive(const std::vector<std::vector<double>> &iou,
                                    double gamma);

Alignment AlignQaSetsExhaustive(
    const std::vector<QAPair> &pred, const std::vector<QAPair> &gold,
    const MatchConfig &cfg,
    const std::vector<DiscoursePrefix> *prefixes = nullptr);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Micro-averaged counts for one measure.
struct Counts {
  int64_t true_positives = 0;
  int64_t predicted = 0;
  int64_t gold = 0;

  int64_t false_positives() const { return predicted - true_positives; }
  int64_t false_negatives() const { return gold - true_positives; }
  Prf Score() const;
  Counts &operator+=(const Counts &other);
};

Prf ScorePrf(int64_t true_positives, int64_t predicted, int64_t gold);

struct ScoreReport {
  Task task = Task::kQasrl;
  // Unlabeled / labeled counts: UA/LA for predicate tasks, UQA and the
  // labeled counterpart for discourse.
  Counts unlabeled;
  Counts labeled;
  // Discourse only: aligned pairs, and those with equal prefix / sense.
  int64_t aligned_pairs = 0;
  int64_t prefix_matches = 0;
  int64_t sense_matches = 0;
  int64_t unparseable_predictions = 0;
  std::vector<std::string> diagnostics;

  Prf ua() const { return unlabeled.Score(); }
  Prf la() const { return labeled.Score(); }
  Prf uqa() const { return unlabeled.Score(); }
  double prefix_accuracy() const;
  double lqa_accuracy() const;

  // Associative merge of per-predicate reports.
  ScoreReport &operator+=(const ScoreReport &other);

  // Flat "key value" lines, percentages for P/R/F1.
  std::string ToText() const;
  // JSON object with the same keys and values as ToText.
  std::string ToJson() const;
  // Same keys and values as ToText, one "key<TAB>value" row each.
  std::string ToTsv() const;
  // Ordered percentage measures (P/R/F1 and accuracies) keyed as in ToText.
  std::vector<std::pair<std::string, double>> Values() const;
};

// Scores one predicate's QA set. Unparseable predicted questions count as
// labeled false positives and are listed in diagnostics.
ScoreReport ScoreUaLa(const std::vector<QAPair> &pred,
                      const std::vector<QAPair> &gold,
                      std::string_view verb_form, const MatchConfig &cfg,
                      const QuestionGrammar &grammar);

// Scores one sentence's discourse QA set. Predictions without a known
// prefix are diagnostics and false positives.
ScoreReport ScoreDiscourse(const std::vector<QAPair> &pred,
                           const std::vector<QAPair> &gold,
                           const MatchConfig &cfg,
                           const std::vector<DiscoursePrefix> &prefixes);

struct PositionBucket {
  size_t position = 0;
  double precision = 0.0;
  int64_t aligned = 0;
  int64_t support = 0;
};

// Precision of predicted QAs grouped by their index in the generated
// sequence. Each instance pairs an ordered prediction list with its gold set.
struct PositionInstance {
  std::vector<QAPair> pred;
  std::vector<QAPair> gold;
};

std::vector<PositionBucket> PositionPrecision(
    const std::vector<PositionInstance> &instances, const MatchConfig &cfg,
    const std::vector<DiscoursePrefix> *prefixes = nullptr);

}  // namespace qasem

#endif  // QASEM_METRICS_H_
