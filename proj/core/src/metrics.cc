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

#include "qasem/metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "qasem/common.h"

namespace qasem {
namespace {

constexpr double kEps = 1e-9;

// Minimum-cost perfect assignment on a square matrix (Hungarian method with
// potentials). Returns the column assigned to each row.
std::vector<int> SolveAssignment(const std::vector<std::vector<double>> &cost) {
  const size_t n = cost.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (size_t i = 1; i <= n; ++i) {
    p[0] = i;
    size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      size_t i0 = p[j0], j1 = 0;
      double delta = inf;
      for (size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  }
  return row_to_col;
}

// Maximum total weight over a (padded) weight matrix; zero entries are
// non-edges.
double MaxWeight(const std::vector<std::vector<double>> &weight,
                 std::vector<int> *assignment = nullptr) {
  size_t rows = weight.size();
  size_t cols = rows == 0 ? 0 : weight[0].size();
  size_t n = std::max(rows, cols);
  if (n == 0) return 0.0;
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < cols; ++j) cost[i][j] = -weight[i][j];
  }
  std::vector<int> row_to_col = SolveAssignment(cost);
  double total = 0.0;
  for (size_t i = 0; i < rows; ++i) {
    int j = row_to_col[i];
    if (j >= 0 && static_cast<size_t>(j) < cols) total += weight[i][j];
  }
  if (assignment != nullptr) {
    row_to_col.resize(rows);
    *assignment = row_to_col;
  }
  return total;
}

Alignment BuildAlignment(const std::vector<std::vector<double>> &iou,
                         const std::vector<int> &pred_to_gold) {
  Alignment alignment;
  size_t rows = iou.size();
  size_t cols = rows == 0 ? 0 : iou[0].size();
  std::vector<char> gold_used(cols, 0);
  for (size_t i = 0; i < rows; ++i) {
    int j = pred_to_gold[i];
    if (j >= 0) {
      alignment.pairs.push_back({static_cast<int>(i), j, iou[i][j]});
      gold_used[j] = 1;
    } else {
      alignment.unmatched_pred.push_back(static_cast<int>(i));
    }
  }
  for (size_t j = 0; j < cols; ++j) {
    if (!gold_used[j]) alignment.unmatched_gold.push_back(static_cast<int>(j));
  }
  return alignment;
}

size_t Columns(const std::vector<std::vector<double>> &iou) {
  return iou.empty() ? 0 : iou[0].size();
}

void ValidateMatrix(const std::vector<std::vector<double>> &iou) {
  size_t cols = Columns(iou);
  for (const auto &row : iou) {
    if (row.size() != cols) {
      throw Error(ErrorCode::kInvalidArgument, "ragged IOU matrix");
    }
  }
}

bool IsPunct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::string Percent(double value) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(1) << value * 100.0;
  return ss.str();
}

}  // namespace

double Alignment::TotalIou() const {
  double total = 0.0;
  for (const auto &pair : pairs) total += pair.iou;
  return total;
}

std::vector<std::string> LexicalTokens(std::string_view text) {
  std::vector<std::string> tokens;
  for (const std::string &raw : SplitWhitespace(text)) {
    size_t begin = 0, end = raw.size();
    while (begin < end && IsPunct(raw[begin])) ++begin;
    while (end > begin && IsPunct(raw[end - 1])) --end;
    if (end > begin) tokens.push_back(ToLower(raw.substr(begin, end - begin)));
  }
  return tokens;
}

double TokenIou(const std::set<std::string> &a, const std::set<std::string> &b) {
  if (a.empty() && b.empty()) return 0.0;
  size_t intersection = 0;
  for (const auto &token : a) intersection += b.count(token);
  size_t union_size = a.size() + b.size() - intersection;
  return static_cast<double>(intersection) / static_cast<double>(union_size);
}

double TokenIou(std::string_view a, std::string_view b) {
  auto ta = LexicalTokens(a);
  auto tb = LexicalTokens(b);
  return TokenIou(std::set<std::string>(ta.begin(), ta.end()),
                  std::set<std::string>(tb.begin(), tb.end()));
}

std::set<std::string> MatchTokens(const QAPair &qa, Task mode,
                                  const std::vector<DiscoursePrefix> *prefixes) {
  std::set<std::string> tokens;
  auto add = [&](std::string_view text) {
    for (auto &token : LexicalTokens(text)) tokens.insert(std::move(token));
  };
  for (const auto &answer : qa.answers) add(answer.text);
  if (mode == Task::kDiscourse) {
    std::string body = qa.question;
    if (prefixes != nullptr) {
      if (auto match = FindDiscoursePrefix(qa.question, *prefixes)) {
        body = match->body;
      }
    }
    add(body);
  }
  return tokens;
}

std::vector<std::vector<double>> IouMatrix(
    const std::vector<QAPair> &pred, const std::vector<QAPair> &gold,
    const MatchConfig &cfg, const std::vector<DiscoursePrefix> *prefixes) {
  std::vector<std::set<std::string>> gold_tokens;
  gold_tokens.reserve(gold.size());
  for (const auto &qa : gold) {
    gold_tokens.push_back(MatchTokens(qa, cfg.mode, prefixes));
  }
  std::vector<std::vector<double>> matrix(pred.size(),
                                          std::vector<double>(gold.size()));
  for (size_t i = 0; i < pred.size(); ++i) {
    auto pred_tokens = MatchTokens(pred[i], cfg.mode, prefixes);
    for (size_t j = 0; j < gold.size(); ++j) {
      matrix[i][j] = TokenIou(pred_tokens, gold_tokens[j]);
    }
  }
  return matrix;
}

Alignment AlignFromMatrix(const std::vector<std::vector<double>> &iou,
                          double gamma) {
  ValidateMatrix(iou);
  const size_t rows = iou.size();
  const size_t cols = Columns(iou);
  if (rows == 0 || cols == 0) {
    return BuildAlignment(iou, std::vector<int>(rows, -1));
  }

  // Edge weights put cardinality first: any extra edge outweighs the whole
  // IOU mass of a smaller matching.
  const double base = static_cast<double>(std::min(rows, cols)) + 1.0;
  std::vector<std::vector<double>> weight(rows, std::vector<double>(cols, 0.0));
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < cols; ++j) {
      if (iou[i][j] >= gamma && iou[i][j] > 0.0) weight[i][j] = base + iou[i][j];
    }
  }
  const double optimum = MaxWeight(weight);

  // Fix predictions one at a time to the smallest gold index (or to being
  // unmatched) that still admits an optimal completion.
  std::vector<int> pred_to_gold(rows, -1);
  double fixed_weight = 0.0;
  std::vector<std::vector<double>> residual = weight;
  for (size_t i = 0; i < rows; ++i) {
    bool placed = false;
    for (size_t j = 0; j < cols && !placed; ++j) {
      if (residual[i][j] == 0.0) continue;
      auto trial = residual;
      double w = trial[i][j];
      for (size_t c = 0; c < cols; ++c) trial[i][c] = 0.0;
      for (size_t r = 0; r < rows; ++r) trial[r][j] = 0.0;
      if (fixed_weight + w + MaxWeight(trial) >= optimum - kEps) {
        pred_to_gold[i] = static_cast<int>(j);
        fixed_weight += w;
        residual = std::move(trial);
        placed = true;
      }
    }
    if (!placed) {
      for (size_t c = 0; c < cols; ++c) residual[i][c] = 0.0;
    }
  }
  return BuildAlignment(iou, pred_to_gold);
}

Alignment AlignFromMatrixExhaustive(const std::vector<std::vector<double>> &iou,
                                    double gamma) {
  ValidateMatrix(iou);
  const size_t rows = iou.size();
  const size_t cols = Columns(iou);
  if (rows > 8 || cols > 8) {
    throw Error(ErrorCode::kSizeLimit,
                "exhaustive alignment supports at most 8x8, got " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  }
  std::vector<int> current(rows, -1), best(rows, -1);
  std::vector<char> used(cols, 0);
  int best_size = -1;
  double best_total = -1.0;

  // Depth-first in lexicographic order (gold ascending, unmatched last); the
  // first optimum reached is the lexicographically smallest one.
  auto search = [&](auto &&self, size_t i, int size, double total) -> void {
    if (i == rows) {
      if (size > best_size || (size == best_size && total > best_total + kEps)) {
        best_size = size;
        best_total = total;
        best = current;
      }
      return;
    }
    for (size_t j = 0; j < cols; ++j) {
      if (used[j] || !(iou[i][j] >= gamma && iou[i][j] > 0.0)) continue;
      used[j] = 1;
      current[i] = static_cast<int>(j);
      self(self, i + 1, size + 1, total + iou[i][j]);
      current[i] = -1;
      used[j] = 0;
    }
    self(self, i + 1, size, total);
  };
  search(search, 0, 0, 0.0);
  return BuildAlignment(iou, best);
}

Alignment AlignQaSets(const std::vector<QAPair> &pred,
                      const std::vector<QAPair> &gold, const MatchConfig &cfg,
                      const std::vector<DiscoursePrefix> *prefixes) {
  return AlignFromMatrix(IouMatrix(pred, gold, cfg, prefixes), cfg.gamma);
}

Alignment AlignQaSetsExhaustive(const std::vector<QAPair> &pred,
                                const std::vector<QAPair> &gold,
                                const MatchConfig &cfg,
                                const std::vector<DiscoursePrefix> *prefixes) {
  if (pred.size() > 8 || gold.size() > 8) {
    throw Error(ErrorCode::kSizeLimit,
                "exhaustive alignment supports at most 8 QAs per side");
  }
  return AlignFromMatrixExhaustive(IouMatrix(pred, gold, cfg, prefixes),
                                   cfg.gamma);
}

Prf ScorePrf(int64_t true_positives, int64_t predicted, int64_t gold) {
  Prf prf;
  prf.precision = predicted > 0 ? static_cast<double>(true_positives) /
                                      static_cast<double>(predicted)
                                : 0.0;
  prf.recall = gold > 0 ? static_cast<double>(true_positives) /
                              static_cast<double>(gold)
                        : 0.0;
  double sum = prf.precision + prf.recall;
  prf.f1 = sum > 0.0 ? 2.0 * prf.precision * prf.recall / sum : 0.0;
  return prf;
}

Prf Counts::Score() const { return ScorePrf(true_positives, predicted, gold); }

Counts &Counts::operator+=(const Counts &other) {
  true_positives += other.true_positives;
  predicted += other.predicted;
  gold += other.gold;
  return *this;
}

double ScoreReport::prefix_accuracy() const {
  return aligned_pairs > 0 ? static_cast<double>(prefix_matches) /
                                 static_cast<double>(aligned_pairs)
                           : 0.0;
}

double ScoreReport::lqa_accuracy() const {
  return aligned_pairs > 0 ? static_cast<double>(sense_matches) /
                                 static_cast<double>(aligned_pairs)
                           : 0.0;
}

ScoreReport &ScoreReport::operator+=(const ScoreReport &other) {
  unlabeled += other.unlabeled;
  labeled += other.labeled;
  aligned_pairs += other.aligned_pairs;
  prefix_matches += other.prefix_matches;
  sense_matches += other.sense_matches;
  unparseable_predictions += other.unparseable_predictions;
  diagnostics.insert(diagnostics.end(), other.diagnostics.begin(),
                     other.diagnostics.end());
  return *this;
}

std::vector<std::pair<std::string, double>> ScoreReport::Values() const {
  std::vector<std::pair<std::string, double>> values;
  auto add_prf = [&](const std::string &name, const Prf &prf) {
    values.emplace_back(name + "_p", prf.precision * 100.0);
    values.emplace_back(name + "_r", prf.recall * 100.0);
    values.emplace_back(name + "_f1", prf.f1 * 100.0);
  };
  if (task == Task::kDiscourse) {
    add_prf("uqa", uqa());
    values.emplace_back("lqa_accuracy", lqa_accuracy() * 100.0);
    values.emplace_back("prefix_accuracy", prefix_accuracy() * 100.0);
  } else {
    add_prf("ua", ua());
    add_prf("la", la());
  }
  return values;
}

namespace {

// Rows shared by every rendering: percentages with one decimal, then raw
// counts. All values except the task name are numeric literals.
std::vector<std::pair<std::string, std::string>> ReportRows(
    const ScoreReport &report) {
  std::vector<std::pair<std::string, std::string>> rows;
  rows.emplace_back("task", TaskName(report.task));
  for (const auto &[key, value] : report.Values()) {
    rows.emplace_back(key, Percent(value / 100.0));
  }
  bool discourse = report.task == Task::kDiscourse;
  std::string u = discourse ? "uqa" : "ua";
  std::string l = discourse ? "lqa" : "la";
  auto count = [&](const std::string &key, int64_t value) {
    rows.emplace_back(key, std::to_string(value));
  };
  count(u + "_tp", report.unlabeled.true_positives);
  count(u + "_fp", report.unlabeled.false_positives());
  count(u + "_fn", report.unlabeled.false_negatives());
  count(l + "_tp", report.labeled.true_positives);
  count(l + "_fp", report.labeled.false_positives());
  count(l + "_fn", report.labeled.false_negatives());
  if (discourse) count("aligned_pairs", report.aligned_pairs);
  count("unparseable_predictions", report.unparseable_predictions);
  count("diagnostics", static_cast<int64_t>(report.diagnostics.size()));
  return rows;
}

}  // namespace

std::string ScoreReport::ToText() const {
  std::ostringstream out;
  for (const auto &[key, value] : ReportRows(*this)) {
    out << key << " " << value << "\n";
  }
  return out.str();
}

std::string ScoreReport::ToTsv() const {
  std::ostringstream out;
  for (const auto &[key, value] : ReportRows(*this)) {
    out << key << "\t" << value << "\n";
  }
  return out.str();
}

std::string ScoreReport::ToJson() const {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (const auto &[key, value] : ReportRows(*this)) {
    out << (first ? "" : ", ") << "\"" << key << "\": ";
    if (key == "task") {
      out << "\"" << value << "\"";
    } else {
      out << value;
    }
    first = false;
  }
  out << "}";
  return out.str();
}

ScoreReport ScoreUaLa(const std::vector<QAPair> &pred,
                      const std::vector<QAPair> &gold,
                      std::string_view verb_form, const MatchConfig &cfg,
                      const QuestionGrammar &grammar) {
  ScoreReport report;
  report.task = cfg.mode;
  Alignment alignment = AlignQaSets(pred, gold, cfg);

  auto parse_all = [&](const std::vector<QAPair> &qas, const char *side) {
    std::vector<std::optional<QasrlQuestion>> parsed;
    for (const auto &qa : qas) {
      std::string error;
      parsed.push_back(grammar.TryParse(qa.question, verb_form, &error));
      if (!parsed.back()) {
        report.diagnostics.push_back(std::string(side) + " UNPARSEABLE '" +
                                     qa.question + "': " + error);
      }
    }
    return parsed;
  };
  auto pred_questions = parse_all(pred, "pred");
  auto gold_questions = parse_all(gold, "gold");
  for (const auto &q : pred_questions) {
    if (!q) ++report.unparseable_predictions;
  }

  report.unlabeled = {static_cast<int64_t>(alignment.pairs.size()),
                      static_cast<int64_t>(pred.size()),
                      static_cast<int64_t>(gold.size())};
  int64_t labeled_tp = 0;
  for (const auto &pair : alignment.pairs) {
    const auto &p = pred_questions[pair.pred];
    const auto &g = gold_questions[pair.gold];
    if (p && g && grammar.Equivalent(*p, *g)) ++labeled_tp;
  }
  report.labeled = {labeled_tp, static_cast<int64_t>(pred.size()),
                    static_cast<int64_t>(gold.size())};
  return report;
}

ScoreReport ScoreDiscourse(const std::vector<QAPair> &pred,
                           const std::vector<QAPair> &gold,
                           const MatchConfig &cfg,
                           const std::vector<DiscoursePrefix> &prefixes) {
  ScoreReport report;
  report.task = Task::kDiscourse;

  std::vector<QAPair> valid_pred;
  std::vector<PrefixMatch> pred_prefix;
  for (const auto &qa : pred) {
    auto match = FindDiscoursePrefix(qa.question, prefixes);
    if (!match) {
      report.diagnostics.push_back("pred NO_PREFIX '" + qa.question + "'");
      ++report.unparseable_predictions;
      continue;
    }
    valid_pred.push_back(qa);
    pred_prefix.push_back(*match);
  }
  std::vector<std::optional<PrefixMatch>> gold_prefix;
  for (const auto &qa : gold) {
    gold_prefix.push_back(FindDiscoursePrefix(qa.question, prefixes));
    if (!gold_prefix.back()) {
      report.diagnostics.push_back("gold NO_PREFIX '" + qa.question + "'");
    }
  }

  Alignment alignment = AlignQaSets(valid_pred, gold, cfg, &prefixes);
  report.aligned_pairs = static_cast<int64_t>(alignment.pairs.size());
  for (const auto &pair : alignment.pairs) {
    const auto &g = gold_prefix[pair.gold];
    if (!g) continue;
    const auto &p = pred_prefix[pair.pred];
    if (p.prefix.surface == g->prefix.surface) ++report.prefix_matches;
    if (p.prefix.sense == g->prefix.sense) ++report.sense_matches;
  }
  report.unlabeled = {report.aligned_pairs, static_cast<int64_t>(pred.size()),
                      static_cast<int64_t>(gold.size())};
  report.labeled = {report.sense_matches, static_cast<int64_t>(pred.size()),
                    static_cast<int64_t>(gold.size())};
  return report;
}

std::vector<PositionBucket> PositionPrecision(
    const std::vector<PositionInstance> &instances, const MatchConfig &cfg,
    const std::vector<DiscoursePrefix> *prefixes) {
  std::vector<PositionBucket> buckets;
  for (const auto &instance : instances) {
    Alignment alignment = AlignQaSets(instance.pred, instance.gold, cfg, prefixes);
    std::vector<char> matched(instance.pred.size(), 0);
    for (const auto &pair : alignment.pairs) matched[pair.pred] = 1;
    if (buckets.size() < instance.pred.size()) {
      size_t old = buckets.size();
      buckets.resize(instance.pred.size());
      for (size_t p = old; p < buckets.size(); ++p) buckets[p].position = p;
    }
    for (size_t p = 0; p < instance.pred.size(); ++p) {
      ++buckets[p].support;
      if (matched[p]) ++buckets[p].aligned;
    }
  }
  for (auto &bucket : buckets) {
    bucket.precision = bucket.support > 0
                           ? static_cast<double>(bucket.aligned) /
                                 static_cast<double>(bucket.support)
                           : 0.0;
  }
  return buckets;
}

}  // namespace qasem
