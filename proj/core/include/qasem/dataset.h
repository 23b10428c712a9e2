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

#ifndef QASEM_DATASET_H_
#define QASEM_DATASET_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qasem/common.h"
#include "qasem/seq_codec.h"

namespace qasem {

// One gold-annotated predicate (qasrl/qanom) or sentence (discourse).
struct DatasetRecord {
  Task task = Task::kQasrl;
  std::string sentence_id;
  std::string domain;
  std::vector<std::string> tokens;
  int predicate_index = -1;  // predicate tasks only
  std::string verb_form;     // predicate tasks only
  bool is_predicate = true;  // false for non-predicative qanom candidates
  std::vector<QAPair> qas;

  // "sentence_id" for discourse, "sentence_id:predicate_index" otherwise.
  std::string Key() const;
  std::string Sentence() const { return Join(tokens, " "); }

  bool operator==(const DatasetRecord &) const = default;
};

enum class DatasetFormat {
  kCanonical,  // one DatasetRecord per JSONL line
  kQasrlV2,    // QA-SRL 2018 JSONL: sentenceId, sentenceTokens, verbEntries
  kQaRows,     // one QA per JSONL row, grouped into records on load
  kAuto,       // chosen from the first non-empty line
};

DatasetFormat ParseDatasetFormat(const std::string &name);

// Format of a JSONL file judged by one of its lines: "verbEntries" marks
// QA-SRL 2018, a "qas" array marks canonical, anything else is QA rows.
DatasetFormat DetectDatasetFormat(const std::string &line);

struct LoadDiagnostic {
  int line = 0;
  std::string key;
  std::string message;
};

using RecordSink = std::function<void(DatasetRecord &&)>;

// Streams validated records to `sink`. Records whose gold answers cannot be
// aligned (predicate tasks) are skipped with a diagnostic. Malformed lines
// throw Error(kSchema) naming the line number.
std::vector<LoadDiagnostic> ReadDataset(std::istream &in, Task task,
                                        DatasetFormat format,
                                        const RecordSink &sink);

struct LoadedDataset {
  std::vector<DatasetRecord> records;
  std::vector<LoadDiagnostic> diagnostics;
};

// Throws Error(kIo) when the file cannot be opened.
LoadedDataset LoadDataset(const std::string &path, Task task,
                          DatasetFormat format = DatasetFormat::kAuto);

// Canonical JSONL serialization of one record (no trailing newline).
std::string RecordToJson(const DatasetRecord &record);
DatasetRecord RecordFromJson(const std::string &line, Task default_task);

void WriteDataset(std::ostream &out, const std::vector<DatasetRecord> &records);

// Table-style corpus counts.
struct CorpusStats {
  int64_t sentences = 0;
  int64_t predicates = 0;
  int64_t questions = 0;
  int64_t answers = 0;

  bool operator==(const CorpusStats &) const = default;
};

// Streaming accumulator; sentence counting deduplicates by sentence_id.
class StatsAccumulator {
 public:
  void Add(const DatasetRecord &record);
  CorpusStats Result() const;

 private:
  std::set<std::string> sentence_ids_;
  CorpusStats counts_;
};

CorpusStats ComputeStats(const std::vector<DatasetRecord> &records);

struct TrainingPair {
  std::string source;
  std::string target;

  bool operator==(const TrainingPair &) const = default;
};

struct EmissionConfig {
  // Exactly one of the two is set: a fixed order or permutation augmentation.
  std::optional<LinearizationStrategy> order;
  std::optional<PermutationScheme> permutations;
  InputEncodingConfig predicate_encoding;
  InputEncodingConfig discourse_encoding = InputEncodingConfig::Discourse();
};

struct EmissionResult {
  std::vector<TrainingPair> pairs;
  std::vector<std::string> diagnostics;
};

// Discourse records sharing a sentence_id are merged, keeping file order of
// both sentences and QAs.
std::vector<DatasetRecord> GroupDiscourseBySentence(
    const std::vector<DatasetRecord> &records);

// One pair per predicative record under a fixed order, or one pair per
// ordering under augmentation. Non-predicative candidates are skipped.
// Discourse targets keep gold file order under fixed-order strategies.
// Codec failures are reported as diagnostics and the record is skipped.
EmissionResult EmitTrainingPairs(const std::vector<DatasetRecord> &records,
                                 const EmissionConfig &cfg);

enum class TaskSignal { kNone, kPrefixVariant, kTypedMarker, kOutputType };

TaskSignal ParseTaskSignal(const std::string &name);

struct JointCorpusConfig {
  int duplication_factor = 14;
  TaskSignal task_signal = TaskSignal::kNone;
  uint64_t seed = 0;
};

// A reference into the source corpora; QANom records are repeated by
// reference rather than copied.
struct JointEntry {
  const DatasetRecord *record = nullptr;
  int copy = 0;
};

// Every QA-SRL record once and every QANom record `duplication_factor`
// times. Factor 1 concatenates; larger factors interleave by a seeded
// shuffle. The returned entries point into
// the input vectors, which must outlive them.
std::vector<JointEntry> BuildJointCorpus(
    const std::vector<DatasetRecord> &qasrl_records,
    const std::vector<DatasetRecord> &qanom_records,
    const JointCorpusConfig &cfg);

struct JointQuestionCounts {
  int64_t verbal = 0;
  int64_t nominal = 0;
};

JointQuestionCounts CountJointQuestions(const std::vector<JointEntry> &corpus);

// Emits training pairs for a joint corpus, applying the task-signal
// decoration to sources (prefix or marker) or targets (appended type).
EmissionResult EmitJointTrainingPairs(const std::vector<JointEntry> &corpus,
                                      const JointCorpusConfig &joint,
                                      const EmissionConfig &cfg);

// Uniform sample without replacement, returned in input order. Throws
// Error(kInsufficientRecords) when fewer records pass the domain filter.
std::vector<DatasetRecord> SampleSubset(
    const std::vector<DatasetRecord> &records, size_t target_size,
    uint64_t seed, const std::optional<std::string> &domain_filter = {});

}  // namespace qasem

#endif  // QASEM_DATASET_H_
