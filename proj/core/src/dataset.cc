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

#include "qasem/dataset.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace qasem {

using nlohmann::json;

std::string DatasetRecord::Key() const {
  if (task == Task::kDiscourse) return sentence_id;
  return sentence_id + ":" + std::to_string(predicate_index);
}

DatasetFormat ParseDatasetFormat(const std::string &name) {
  std::string lower = ToLower(name);
  if (lower == "canonical" || lower == "jsonl") return DatasetFormat::kCanonical;
  if (lower == "qasrl-v2" || lower == "qasrl2018") return DatasetFormat::kQasrlV2;
  if (lower == "qa-rows" || lower == "rows") return DatasetFormat::kQaRows;
  if (lower == "auto") return DatasetFormat::kAuto;
  throw Error(ErrorCode::kInvalidArgument, "unknown dataset format '" + name + "'");
}

DatasetFormat DetectDatasetFormat(const std::string &line) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!j.is_object()) return DatasetFormat::kCanonical;
  if (j.contains("verbEntries")) return DatasetFormat::kQasrlV2;
  if (j.contains("qas")) return DatasetFormat::kCanonical;
  return DatasetFormat::kQaRows;
}

namespace {

std::string DomainFromId(const std::string &sentence_id) {
  size_t colon = sentence_id.find(':');
  if (colon == std::string::npos || colon == 0) return "";
  return ToLower(sentence_id.substr(0, colon));
}

AnswerSpan AnswerFromJson(const json &value) {
  if (value.is_string()) return {value.get<std::string>(), kUnaligned, kUnaligned};
  AnswerSpan span;
  span.text = value.at("text").get<std::string>();
  if (value.contains("start") && !value["start"].is_null()) {
    span.start_token = value["start"].get<int>();
    span.end_token = value.at("end").get<int>();
  }
  return span;
}

json AnswerToJson(const AnswerSpan &span) {
  json value = {{"text", span.text}};
  if (span.aligned()) {
    value["start"] = span.start_token;
    value["end"] = span.end_token;
  }
  return value;
}

// Checks record invariants and aligns answers in place. Returns an error
// message, or an empty string when the record is valid.
std::string ValidateAndAlign(DatasetRecord &record) {
  if (record.sentence_id.empty()) return "missing sentence_id";
  if (record.tokens.empty()) return "empty sentence";
  if (IsPredicateTask(record.task)) {
    if (record.predicate_index < 0 ||
        static_cast<size_t>(record.predicate_index) >= record.tokens.size()) {
      return "predicate_index out of range";
    }
    if (!record.is_predicate && !record.qas.empty()) {
      return "non-predicate candidate carries QAs";
    }
    if (record.is_predicate && Trim(record.verb_form).empty()) {
      return "missing verb_form";
    }
  }
  for (auto &qa : record.qas) {
    if (Trim(qa.question).empty()) return "empty question";
    if (qa.answers.empty()) return "question without answers: " + qa.question;
    if (record.task == Task::kDiscourse && qa.answers.size() != 1) {
      return "discourse question must have one answer: " + qa.question;
    }
    for (auto &answer : qa.answers) {
      answer.text = NormalizeWhitespace(answer.text);
      if (answer.aligned()) {
        if (SpanMatchesTokens(answer, record.tokens)) continue;
        if (IsPredicateTask(record.task)) {
          return "answer '" + answer.text + "' does not match span [" +
                 std::to_string(answer.start_token) + "," +
                 std::to_string(answer.end_token) + ")";
        }
      }
      AnswerSpan span = AlignAnswer(answer.text, record.tokens);
      if (!span.aligned() && IsPredicateTask(record.task)) {
        return "answer '" + answer.text + "' is not a sentence span";
      }
      answer.start_token = span.start_token;
      answer.end_token = span.end_token;
    }
  }
  return "";
}

DatasetRecord CanonicalFromJson(const json &j, Task default_task) {
  DatasetRecord record;
  record.task = j.contains("task") ? ParseTask(j["task"].get<std::string>())
                                   : default_task;
  record.sentence_id = j.at("sentence_id").get<std::string>();
  record.domain = j.value("domain", DomainFromId(record.sentence_id));
  if (j.contains("tokens")) {
    record.tokens = j["tokens"].get<std::vector<std::string>>();
  } else {
    record.tokens = SplitWhitespace(j.at("sentence").get<std::string>());
  }
  if (IsPredicateTask(record.task)) {
    record.predicate_index = j.at("predicate_index").get<int>();
    record.verb_form = j.value("verb_form", std::string());
    record.is_predicate = j.value("is_predicate", true);
  }
  for (const auto &qa_json : j.value("qas", json::array())) {
    QAPair qa;
    qa.question = NormalizeWhitespace(qa_json.at("question").get<std::string>());
    for (const auto &answer : qa_json.at("answers")) {
      qa.answers.push_back(AnswerFromJson(answer));
    }
    record.qas.push_back(std::move(qa));
  }
  return record;
}

[[noreturn]] void SchemaError(int line, const std::string &what) {
  throw Error(ErrorCode::kSchema, "line " + std::to_string(line) + ": " + what);
}

json ParseLine(const std::string &line, int line_number) {
  try {
    return json::parse(line);
  } catch (const json::exception &e) {
    SchemaError(line_number, e.what());
  }
}

// QA-SRL 2018: one sentence per line with nested verb entries. A question
// is kept when at least one judgment marks it valid; its answers are the
// distinct spans of the valid judgments in order of appearance.
std::vector<DatasetRecord> RecordsFromQasrlV2(const json &j, Task task) {
  std::vector<DatasetRecord> records;
  std::string sentence_id = j.at("sentenceId").get<std::string>();
  auto tokens = j.at("sentenceTokens").get<std::vector<std::string>>();
  std::vector<std::pair<int, const json *>> entries;
  for (const auto &[key, entry] : j.at("verbEntries").items()) {
    entries.emplace_back(entry.at("verbIndex").get<int>(), &entry);
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });
  for (const auto &[index, entry] : entries) {
    DatasetRecord record;
    record.task = task;
    record.sentence_id = sentence_id;
    record.domain = DomainFromId(sentence_id);
    record.tokens = tokens;
    record.predicate_index = index;
    const json forms = entry->value("verbInflectedForms", json::object());
    record.verb_form = forms.value("stem", std::string());
    if (record.verb_form.empty()) record.verb_form = ToLower(tokens.at(index));
    const json labels = entry->value("questionLabels", json::object());
    for (const auto &[question_key, label] : labels.items()) {
      QAPair qa;
      qa.question = NormalizeWhitespace(
          label.value("questionString", question_key));
      std::set<std::pair<int, int>> seen;
      const json judgments = label.value("answerJudgments", json::array());
      for (const auto &judgment : judgments) {
        if (!judgment.value("isValid", false)) continue;
        const json spans = judgment.value("spans", json::array());
        for (const auto &span : spans) {
          int start = span.at(0).get<int>();
          int end = span.at(1).get<int>();
          if (!seen.insert({start, end}).second) continue;
          if (start < 0 || end <= start ||
              static_cast<size_t>(end) > tokens.size()) {
            continue;
          }
          std::vector<std::string> words(tokens.begin() + start,
                                         tokens.begin() + end);
          qa.answers.push_back({Join(words, " "), start, end});
        }
      }
      if (!qa.answers.empty()) record.qas.push_back(std::move(qa));
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::string QuestionFromRow(const json &value) {
  if (value.is_string()) return NormalizeWhitespace(value.get<std::string>());
  std::vector<std::string> slots;
  for (const auto &slot : value) {
    std::string text = Trim(slot.get<std::string>());
    if (!text.empty() && text != "_") slots.push_back(text);
  }
  if (slots.empty()) return "";
  std::string question = Join(slots, " ");
  if (!EndsWith(question, "?")) question += "?";
  return question;
}

}  // namespace

std::vector<LoadDiagnostic> ReadDataset(std::istream &in, Task task,
                                        DatasetFormat format,
                                        const RecordSink &sink) {
  std::vector<LoadDiagnostic> diagnostics;
  auto emit = [&](DatasetRecord &&record, int line) {
    std::string error = ValidateAndAlign(record);
    if (!error.empty()) {
      diagnostics.push_back({line, record.Key(), error});
      return;
    }
    sink(std::move(record));
  };

  // Grouping state for the row format; records are emitted at end of input
  // in first-seen order.
  std::vector<std::pair<DatasetRecord, int>> grouped;
  std::map<std::string, size_t> group_index;

  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    json j = ParseLine(line, line_number);
    if (format == DatasetFormat::kAuto) format = DetectDatasetFormat(line);
    try {
      switch (format) {
        case DatasetFormat::kCanonical:
          emit(CanonicalFromJson(j, task), line_number);
          break;
        case DatasetFormat::kQasrlV2:
          for (auto &record : RecordsFromQasrlV2(j, task)) {
            emit(std::move(record), line_number);
          }
          break;
        case DatasetFormat::kAuto:
          break;
        case DatasetFormat::kQaRows: {
          std::string sentence_id =
              j.contains("sent_id") ? j["sent_id"].get<std::string>()
                                    : j.at("sentence_id").get<std::string>();
          int predicate_index =
              IsPredicateTask(task) ? j.at("predicate_idx").get<int>() : -1;
          std::string key = sentence_id + ":" + std::to_string(predicate_index);
          auto [it, inserted] = group_index.emplace(key, grouped.size());
          if (inserted) {
            DatasetRecord record;
            record.task = task;
            record.sentence_id = sentence_id;
            record.domain = j.value("domain", DomainFromId(sentence_id));
            record.tokens = SplitWhitespace(j.at("sentence").get<std::string>());
            if (IsPredicateTask(task)) {
              record.predicate_index = predicate_index;
              record.verb_form = j.value("verb_form", std::string());
              record.is_predicate = j.value("is_verbal", true);
            }
            grouped.emplace_back(std::move(record), line_number);
          }
          DatasetRecord &record = grouped[it->second].first;
          std::string question =
              j.contains("question") ? QuestionFromRow(j["question"]) : "";
          if (question.empty()) break;
          QAPair qa;
          qa.question = question;
          if (task == Task::kDiscourse) {
            qa.answers.push_back(
                {NormalizeWhitespace(j.at("answer").get<std::string>()),
                 kUnaligned, kUnaligned});
          } else {
            auto answers = j.at("answers").get<std::vector<std::string>>();
            auto ranges = j.value("answer_ranges", std::vector<std::string>());
            for (size_t a = 0; a < answers.size(); ++a) {
              AnswerSpan span{NormalizeWhitespace(answers[a]), kUnaligned,
                              kUnaligned};
              if (a < ranges.size()) {
                auto bounds = SplitString(ranges[a], ":");
                if (bounds.size() == 2) {
                  span.start_token = std::stoi(bounds[0]);
                  span.end_token = std::stoi(bounds[1]);
                  if (!SpanMatchesTokens(span, record.tokens)) {
                    span.start_token = span.end_token = kUnaligned;
                  }
                }
              }
              qa.answers.push_back(std::move(span));
            }
          }
          record.qas.push_back(std::move(qa));
          break;
        }
      }
    } catch (const json::exception &e) {
      SchemaError(line_number, e.what());
    } catch (const std::invalid_argument &e) {
      SchemaError(line_number, e.what());
    }
  }
  for (auto &[record, first_line] : grouped) emit(std::move(record), first_line);
  return diagnostics;
}

LoadedDataset LoadDataset(const std::string &path, Task task,
                          DatasetFormat format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  LoadedDataset loaded;
  loaded.diagnostics = ReadDataset(in, task, format, [&](DatasetRecord &&r) {
    loaded.records.push_back(std::move(r));
  });
  return loaded;
}

std::string RecordToJson(const DatasetRecord &record) {
  json j;
  j["task"] = TaskName(record.task);
  j["sentence_id"] = record.sentence_id;
  if (!record.domain.empty()) j["domain"] = record.domain;
  j["tokens"] = record.tokens;
  if (IsPredicateTask(record.task)) {
    j["predicate_index"] = record.predicate_index;
    j["verb_form"] = record.verb_form;
    j["is_predicate"] = record.is_predicate;
  }
  json qas = json::array();
  for (const auto &qa : record.qas) {
    json answers = json::array();
    for (const auto &answer : qa.answers) answers.push_back(AnswerToJson(answer));
    qas.push_back({{"question", qa.question}, {"answers", answers}});
  }
  j["qas"] = qas;
  return j.dump();
}

DatasetRecord RecordFromJson(const std::string &line, Task default_task) {
  try {
    return CanonicalFromJson(json::parse(line), default_task);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kSchema, e.what());
  }
}

void WriteDataset(std::ostream &out, const std::vector<DatasetRecord> &records) {
  for (const auto &record : records) out << RecordToJson(record) << "\n";
}

void StatsAccumulator::Add(const DatasetRecord &record) {
  sentence_ids_.insert(record.sentence_id);
  if (IsPredicateTask(record.task) && record.is_predicate) ++counts_.predicates;
  counts_.questions += static_cast<int64_t>(record.qas.size());
  for (const auto &qa : record.qas) {
    counts_.answers += static_cast<int64_t>(qa.answers.size());
  }
}

CorpusStats StatsAccumulator::Result() const {
  CorpusStats stats = counts_;
  stats.sentences = static_cast<int64_t>(sentence_ids_.size());
  return stats;
}

CorpusStats ComputeStats(const std::vector<DatasetRecord> &records) {
  StatsAccumulator acc;
  for (const auto &record : records) acc.Add(record);
  return acc.Result();
}

std::vector<DatasetRecord> GroupDiscourseBySentence(
    const std::vector<DatasetRecord> &records) {
  std::vector<DatasetRecord> grouped;
  std::map<std::string, size_t> index;
  for (const auto &record : records) {
    auto [it, inserted] = index.emplace(record.sentence_id, grouped.size());
    if (inserted) {
      grouped.push_back(record);
    } else {
      auto &qas = grouped[it->second].qas;
      qas.insert(qas.end(), record.qas.begin(), record.qas.end());
    }
  }
  return grouped;
}

namespace {

struct RecordEmission {
  std::string source;
  std::vector<std::vector<QAPair>> orderings;
};

RecordEmission PrepareRecord(const DatasetRecord &record,
                             const EmissionConfig &cfg,
                             const InputEncodingConfig &predicate_encoding,
                             uint64_t salt) {
  RecordEmission emission;
  if (record.task == Task::kDiscourse) {
    emission.source = EncodeSentenceInput(record.tokens, cfg.discourse_encoding);
  } else {
    emission.source = EncodeInput(record.tokens, record.predicate_index,
                                  record.verb_form, predicate_encoding);
  }
  if (cfg.permutations) {
    PermutationScheme scheme = *cfg.permutations;
    scheme.seed = scheme.seed ^ (salt * 0x9e3779b97f4a7c15ULL);
    emission.orderings = PermuteAugment(record.qas, scheme);
  } else if (record.task == Task::kDiscourse) {
    emission.orderings.push_back(record.qas);
  } else {
    LinearizationStrategy strategy = *cfg.order;
    strategy.seed = strategy.seed ^ (salt * 0x9e3779b97f4a7c15ULL);
    emission.orderings.push_back(OrderQas(record.qas, strategy));
  }
  return emission;
}

void CheckEmissionConfig(const EmissionConfig &cfg) {
  if (cfg.order.has_value() == cfg.permutations.has_value()) {
    throw Error(ErrorCode::kInvalidArgument,
                "exactly one of a fixed order or a permutation scheme is "
                "required");
  }
}

}  // namespace

EmissionResult EmitTrainingPairs(const std::vector<DatasetRecord> &records,
                                 const EmissionConfig &cfg) {
  CheckEmissionConfig(cfg);
  EmissionResult result;
  std::vector<DatasetRecord> discourse;
  std::vector<const DatasetRecord *> ordered;
  for (const auto &record : records) {
    if (record.task == Task::kDiscourse) discourse.push_back(record);
  }
  std::vector<DatasetRecord> grouped = GroupDiscourseBySentence(discourse);
  size_t next_group = 0;
  std::set<std::string> emitted_sentences;
  for (const auto &record : records) {
    if (record.task == Task::kDiscourse) {
      // Emit each sentence group at its first occurrence.
      if (!emitted_sentences.insert(record.sentence_id).second) continue;
      ordered.push_back(&grouped[next_group++]);
    } else if (record.is_predicate) {
      ordered.push_back(&record);
    }
  }
  for (size_t i = 0; i < ordered.size(); ++i) {
    const DatasetRecord &record = *ordered[i];
    try {
      RecordEmission emission =
          PrepareRecord(record, cfg, cfg.predicate_encoding, i);
      for (const auto &qas : emission.orderings) {
        result.pairs.push_back({emission.source, LinearizeOutput(qas, record.task)});
      }
    } catch (const Error &e) {
      result.diagnostics.push_back(record.Key() + ": " + e.what());
    }
  }
  return result;
}

TaskSignal ParseTaskSignal(const std::string &name) {
  std::string lower = ToLower(name);
  if (lower == "none") return TaskSignal::kNone;
  if (lower == "prefix") return TaskSignal::kPrefixVariant;
  if (lower == "marker") return TaskSignal::kTypedMarker;
  if (lower == "output") return TaskSignal::kOutputType;
  throw Error(ErrorCode::kInvalidArgument, "unknown task signal '" + name + "'");
}

std::vector<JointEntry> BuildJointCorpus(
    const std::vector<DatasetRecord> &qasrl_records,
    const std::vector<DatasetRecord> &qanom_records,
    const JointCorpusConfig &cfg) {
  if (cfg.duplication_factor < 1) {
    throw Error(ErrorCode::kInvalidArgument, "duplication factor must be >= 1");
  }
  std::vector<JointEntry> corpus;
  corpus.reserve(qasrl_records.size() +
                 qanom_records.size() * cfg.duplication_factor);
  for (const auto &record : qasrl_records) corpus.push_back({&record, 0});
  for (int copy = 0; copy < cfg.duplication_factor; ++copy) {
    for (const auto &record : qanom_records) corpus.push_back({&record, copy});
  }
  // A factor of 1 is plain concatenation; repeated copies are interleaved.
  if (cfg.duplication_factor > 1) {
    Random rng(cfg.seed);
    rng.Shuffle(corpus);
  }
  return corpus;
}

JointQuestionCounts CountJointQuestions(const std::vector<JointEntry> &corpus) {
  JointQuestionCounts counts;
  for (const auto &entry : corpus) {
    auto n = static_cast<int64_t>(entry.record->qas.size());
    if (entry.record->task == Task::kQanom) {
      counts.nominal += n;
    } else {
      counts.verbal += n;
    }
  }
  return counts;
}

EmissionResult EmitJointTrainingPairs(const std::vector<JointEntry> &corpus,
                                      const JointCorpusConfig &joint,
                                      const EmissionConfig &cfg) {
  CheckEmissionConfig(cfg);
  EmissionResult result;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const DatasetRecord &record = *corpus[i].record;
    if (!record.is_predicate || !IsPredicateTask(record.task)) continue;
    bool nominal = record.task == Task::kQanom;
    InputEncodingConfig encoding = cfg.predicate_encoding;
    if (joint.task_signal == TaskSignal::kPrefixVariant) {
      encoding.task_prefix = nominal ? "parse nominal: " : "parse verbal: ";
    } else if (joint.task_signal == TaskSignal::kTypedMarker) {
      encoding.marker_token = nominal ? "[NOMINAL]" : "[VERBAL]";
    }
    try {
      RecordEmission emission = PrepareRecord(record, cfg, encoding, i);
      for (const auto &qas : emission.orderings) {
        std::string target = LinearizeOutput(qas, record.task);
        if (joint.task_signal == TaskSignal::kOutputType) {
          target += std::string(" </type> ") + (nominal ? "nominal" : "verbal");
        }
        result.pairs.push_back({emission.source, std::move(target)});
      }
    } catch (const Error &e) {
      result.diagnostics.push_back(record.Key() + ": " + e.what());
    }
  }
  return result;
}

std::vector<DatasetRecord> SampleSubset(
    const std::vector<DatasetRecord> &records, size_t target_size,
    uint64_t seed, const std::optional<std::string> &domain_filter) {
  std::vector<size_t> candidates;
  for (size_t i = 0; i < records.size(); ++i) {
    if (!domain_filter || ToLower(records[i].domain) == ToLower(*domain_filter)) {
      candidates.push_back(i);
    }
  }
  if (target_size > candidates.size()) {
    throw Error(ErrorCode::kInsufficientRecords,
                "requested " + std::to_string(target_size) + " records, only " +
                    std::to_string(candidates.size()) + " available");
  }
  // Partial Fisher-Yates.
  Random rng(seed);
  for (size_t i = 0; i < target_size; ++i) {
    size_t j = i + static_cast<size_t>(rng.Uniform(candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(target_size);
  std::sort(candidates.begin(), candidates.end());
  std::vector<DatasetRecord> sample;
  sample.reserve(target_size);
  for (size_t i : candidates) sample.push_back(records[i]);
  return sample;
}

}  // namespace qasem
