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

#ifndef QASEM_PIPELINE_H_
#define QASEM_PIPELINE_H_

#include <chrono>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "qasem/common.h"
#include "qasem/dataset.h"
#include "qasem/question_grammar.h"
#include "qasem/seq_codec.h"

namespace qasem {

// Coarse part-of-speech classes consumed by predicate detection.
inline constexpr const char *kVerbTag = "VERB";
inline constexpr const char *kNounTag = "NOUN";
inline constexpr const char *kOtherTag = "X";

struct TaggedSentence {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<std::string> pos_tags;  // one coarse tag per token

  // Throws Error(kInvalidArgument) when the tag count differs.
  void Validate() const;
};

// Maps a fine-grained tag (Penn or UD) to VERB, NOUN or X. Proper nouns and
// auxiliaries map to X.
std::string CoarseTag(std::string_view tag);

// Reads blank-line separated sentences of tab-separated columns. Two-column
// rows are token<TAB>tag; longer rows are read as CoNLL-U (FORM in column
// 2, UPOS in column 4). "# sent_id = X" comments set the sentence id;
// otherwise ids are "s1", "s2", ... Multiword-token and empty-node rows
// are skipped. Throws Error(kSchema) naming the line number.
std::vector<TaggedSentence> ReadConll(std::istream &in);

// Closed-class lookup tagger intended for tests and demos. Tokens found in
// the lexicon take the listed tag; otherwise known verb inflections are
// VERB, lexicon nominalizations are NOUN, and everything else is X. A
// nominalization that is also a verb form is NOUN after a determiner.
class LexiconTagger {
 public:
  LexiconTagger(const Inflections &inflections,
                std::set<std::string> nominalizations,
                std::unordered_map<std::string, std::string> lexicon = {});

  TaggedSentence Tag(const std::vector<std::string> &tokens,
                     const std::string &id = "") const;

 private:
  const Inflections &inflections_;
  std::set<std::string> nominalizations_;
  std::unordered_map<std::string, std::string> lexicon_;
};

enum class PredicateKind { kVerbal, kNominal };

const char *PredicateKindName(PredicateKind kind);

struct PredicateCandidate {
  int index = -1;
  PredicateKind kind = PredicateKind::kVerbal;
  std::string verb_form;
  std::optional<double> score;

  bool operator==(const PredicateCandidate &) const = default;
};

// Auxiliary and modal forms excluded from verbal candidates by default.
const std::set<std::string> &DefaultAuxiliaryStoplist();

// One verbal candidate per VERB token not in `stoplist` (lowercased match),
// with the lemma as verb_form.
std::vector<PredicateCandidate> DetectVerbPredicates(
    const TaggedSentence &sentence, const Inflections &inflections,
    const std::set<std::string> &stoplist = DefaultAuxiliaryStoplist());

// noun -> verb lexicon, keys lowercased.
using NominalizationLexicon = std::unordered_map<std::string, std::string>;

// Parses noun<TAB>verb rows. Throws Error(kSchema) on malformed rows.
NominalizationLexicon LoadNominalizationLexicon(const std::string &tsv);

// One nominal candidate per NOUN token with a lexicon entry.
std::vector<PredicateCandidate> ExtractNominalizationCandidates(
    const TaggedSentence &sentence, const NominalizationLexicon &lexicon);

struct DecodingOptions {
  int beam = 5;
  int max_length = 512;
};

// Text-to-text generation and scoring service. Implementations must be safe
// to call from several threads at once.
class Backend {
 public:
  virtual ~Backend() = default;

  // Exactly one output per input, in input order.
  virtual std::vector<std::string> Generate(
      const std::vector<std::string> &inputs,
      const DecodingOptions &options) = 0;

  // One score in [0, 1] per input.
  virtual std::vector<double> Classify(const std::vector<std::string> &inputs) = 0;

  virtual bool Healthy() { return true; }
};

// Returns inputs verbatim; classification scores are all 1.
class EchoBackend : public Backend {
 public:
  std::vector<std::string> Generate(const std::vector<std::string> &inputs,
                                    const DecodingOptions &options) override;
  std::vector<double> Classify(const std::vector<std::string> &inputs) override;
};

// Answers each encoded source with the linearized gold annotation for the
// same predicate or sentence, which makes ParseSentence an identity map
// over gold data. Unknown sources produce an empty output.
class GoldReplayBackend : public Backend {
 public:
  GoldReplayBackend() = default;

  // Gold QAs are linearized in file order. Non-predicative qanom records
  // register a classification score of 0, all others 1.
  static GoldReplayBackend FromRecords(
      const std::vector<DatasetRecord> &records,
      const InputEncodingConfig &predicate_encoding = {},
      const InputEncodingConfig &discourse_encoding =
          InputEncodingConfig::Discourse());

  void Add(const std::string &source, const std::string &target);
  void SetScore(const std::string &source, double score);
  size_t size() const { return targets_.size(); }

  std::vector<std::string> Generate(const std::vector<std::string> &inputs,
                                    const DecodingOptions &options) override;
  std::vector<double> Classify(const std::vector<std::string> &inputs) override;

 private:
  std::unordered_map<std::string, std::string> targets_;
  std::unordered_map<std::string, double> scores_;
};

// Client for the sidecar wire protocol:
//   POST /generate {"inputs": [...], "beam": n, "max_length": n}
//     -> {"outputs": [...]}
//   POST /classify {"inputs": [...]} -> {"scores": [...]}
//   GET  /health -> {"status": "ok"}
// Transport failures, non-200 statuses and malformed bodies throw
// Error(kBackendUnavailable).
class HttpBackend : public Backend {
 public:
  // `endpoint` is "http://host:port" with an optional path prefix.
  explicit HttpBackend(std::string endpoint,
                       std::chrono::milliseconds timeout =
                           std::chrono::seconds(60));

  std::vector<std::string> Generate(const std::vector<std::string> &inputs,
                                    const DecodingOptions &options) override;
  std::vector<double> Classify(const std::vector<std::string> &inputs) override;
  bool Healthy() override;

  const std::string &endpoint() const { return endpoint_; }

 private:
  std::string Post(const std::string &path, const std::string &body);

  std::string endpoint_;
  std::string host_;
  std::string prefix_;
  std::chrono::milliseconds timeout_;
};

// Request bodies and response parsing for the wire protocol. Response
// parsers throw Error(kBackendUnavailable) on schema violations, including
// a length that differs from `expected`.
std::string GenerateRequestBody(const std::vector<std::string> &inputs,
                                const DecodingOptions &options);
std::string ClassifyRequestBody(const std::vector<std::string> &inputs);
std::vector<std::string> ParseGenerateResponse(const std::string &body,
                                               size_t expected);
std::vector<double> ParseClassifyResponse(const std::string &body,
                                          size_t expected);

struct BatchConfig {
  size_t batch_size = 16;
  int concurrency_limit = 4;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
};

// Raised when some batches still fail after all attempts.
class BackendUnavailableError : public Error {
 public:
  BackendUnavailableError(const std::string &message,
                          std::vector<size_t> failed_batches)
      : Error(ErrorCode::kBackendUnavailable, message),
        failed_batches_(std::move(failed_batches)) {}

  const std::vector<size_t> &failed_batches() const { return failed_batches_; }

 private:
  std::vector<size_t> failed_batches_;
};

// Splits `sources` into batches and generates them with at most
// `concurrency_limit` batches in flight. Each batch is attempted up to
// `max_attempts` times, doubling the backoff after every failure. Outputs
// are in input order.
std::vector<std::string> GenerateBatched(const std::vector<std::string> &sources,
                                         Backend &backend,
                                         const DecodingOptions &options,
                                         const BatchConfig &batch);

// Source string sent to /classify for a nominal candidate.
std::string EncodeClassifierInput(const TaggedSentence &sentence,
                                  const PredicateCandidate &candidate);

// Predicativeness of a nominal candidate in [0, 1].
class PredicativeScorer {
 public:
  virtual ~PredicativeScorer() = default;
  virtual double Score(const PredicateCandidate &candidate,
                       const TaggedSentence &sentence) = 0;
};

class AlwaysTrueScorer : public PredicativeScorer {
 public:
  double Score(const PredicateCandidate &, const TaggedSentence &) override {
    return 1.0;
  }
};

// Scores 1 for gold predicative nominalizations and 0 otherwise, keyed by
// the sentence text and token index.
class GoldLookupScorer : public PredicativeScorer {
 public:
  static GoldLookupScorer FromRecords(const std::vector<DatasetRecord> &records);

  void Add(const std::vector<std::string> &tokens, int index, bool predicative);

  double Score(const PredicateCandidate &candidate,
               const TaggedSentence &sentence) override;

 private:
  std::map<std::pair<std::string, int>, bool> gold_;
};

class RemoteScorer : public PredicativeScorer {
 public:
  explicit RemoteScorer(Backend &backend) : backend_(backend) {}

  double Score(const PredicateCandidate &candidate,
               const TaggedSentence &sentence) override;

 private:
  Backend &backend_;
};

// True iff the scorer's value reaches `threshold`. Throws
// Error(kInvalidArgument) for verbal candidates; scorer errors are rethrown
// with the candidate position attached.
bool ClassifyPredicative(const PredicateCandidate &candidate,
                         const TaggedSentence &sentence,
                         PredicativeScorer &scorer, double threshold);

// Per-predicate (qasrl/qanom) or per-sentence (discourse) parse result.
struct TaskResult {
  Task task = Task::kQasrl;
  int predicate_index = -1;  // -1 for discourse
  std::string verb_form;
  std::vector<QAPair> qas;
  std::vector<Diagnostic> diagnostics;
};

struct QASemRecord {
  std::string sentence_id;
  std::vector<std::string> tokens;
  std::vector<TaskResult> results;

  int64_t QaCount() const;
  int64_t DiagnosticCount() const;
  // All QAs of one task, in result order.
  std::vector<QAPair> QasFor(Task task) const;
};

std::string QASemRecordToJson(const QASemRecord &record);

struct PipelineConfig {
  std::set<Task> tasks = {Task::kQasrl, Task::kQanom, Task::kDiscourse};
  DecodingOptions decoding;
  BatchConfig batch;
  double threshold = 0.5;
  std::set<std::string> auxiliary_stoplist = DefaultAuxiliaryStoplist();
  InputEncodingConfig predicate_encoding;
  InputEncodingConfig discourse_encoding = InputEncodingConfig::Discourse();
};

// Settings read from a key = value file. "[section]" headers are accepted
// and ignored; "#" starts a comment; values may be double-quoted.
struct PipelineSettings {
  std::string endpoint;  // empty selects offline mode
  PipelineConfig config;
  std::chrono::milliseconds timeout{60000};
};

// Applies recognized keys on top of `settings`. Throws Error(kSchema) for
// unknown keys or bad values, naming the line.
void ParsePipelineSettings(const std::string &content, PipelineSettings &settings);

// QASEM_BACKEND_URL, when set and non-empty, replaces the endpoint.
void ApplyEnvironment(PipelineSettings &settings);

// Candidate extraction, predicative classification, batched generation and
// record assembly. Thread-compatible; one instance per thread of control.
class Pipeline {
 public:
  Pipeline(PipelineConfig config, Backend &backend, PredicativeScorer &scorer,
           const QuestionGrammar &grammar, NominalizationLexicon lexicon,
           std::vector<DiscoursePrefix> prefixes);

  // Parses one sentence. Malformed model output lands in diagnostics.
  // Throws BackendUnavailableError when generation keeps failing.
  QASemRecord Parse(const TaggedSentence &sentence);

  // Parses many sentences with a single batched generation pass. Records
  // are returned in input order.
  std::vector<QASemRecord> ParseAll(const std::vector<TaggedSentence> &sentences);

  // Candidates that will be sent to the backend for `sentence`.
  std::vector<PredicateCandidate> Candidates(const TaggedSentence &sentence);

 private:
  struct Job {
    size_t sentence = 0;
    Task task = Task::kQasrl;
    int predicate_index = -1;
    std::string verb_form;
    std::string source;
  };

  void CollectJobs(const TaggedSentence &sentence, size_t position,
                   std::vector<Job> &jobs);
  TaskResult Assemble(const Job &job, const TaggedSentence &sentence,
                      const std::string &output) const;

  PipelineConfig config_;
  Backend &backend_;
  PredicativeScorer &scorer_;
  const QuestionGrammar &grammar_;
  NominalizationLexicon lexicon_;
  std::vector<DiscoursePrefix> prefixes_;
};

// Pipeline::Parse with the bundled grammar, nominalization lexicon and
// discourse prefixes; `tasks` replaces config.tasks.
QASemRecord ParseSentence(const TaggedSentence &sentence,
                          const std::set<Task> &tasks, Backend &backend,
                          PredicativeScorer &scorer,
                          const PipelineConfig &config = {});

}  // namespace qasem

#endif  // QASEM_PIPELINE_H_
