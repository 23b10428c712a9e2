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

#include "qasem/pipeline.h"

#include <gtest/gtest.h>

#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "qasem/resources.h"
#include "test_support.h"

namespace qasem {
namespace {

using testing::Table1Tokens;

const NominalizationLexicon &Lexicon() {
  static const auto kLexicon = LoadNominalizationLexicon(BundledResources().nominalizations);
  return kLexicon;
}

TaggedSentence TagTable1() {
  std::set<std::string> nouns;
  for (const auto &[noun, verb] : Lexicon()) nouns.insert(noun);
  LexiconTagger tagger(QuestionGrammar::Default().inflections(), nouns);
  return tagger.Tag(Table1Tokens(), "table1");
}

// Scripted backend: the output for each input comes from a callback.
class FunctionBackend : public Backend {
 public:
  explicit FunctionBackend(std::function<std::string(const std::string &)> fn)
      : fn_(std::move(fn)) {}

  std::vector<std::string> Generate(const std::vector<std::string> &inputs,
                                    const DecodingOptions &) override {
    std::vector<std::string> outputs;
    for (const auto &input : inputs) outputs.push_back(fn_(input));
    return outputs;
  }
  std::vector<double> Classify(const std::vector<std::string> &inputs) override {
    return std::vector<double>(inputs.size(), 1.0);
  }

 private:
  std::function<std::string(const std::string &)> fn_;
};

// Fails the first `failures` calls of every batch, then echoes.
class FlakyBackend : public Backend {
 public:
  FlakyBackend(int failures, std::set<std::string> poisoned = {})
      : failures_(failures), poisoned_(std::move(poisoned)) {}

  std::vector<std::string> Generate(const std::vector<std::string> &inputs,
                                    const DecodingOptions &) override {
    ++calls;
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto &input : inputs) {
      if (poisoned_.count(input)) throw Error(ErrorCode::kBackendUnavailable, "poisoned");
    }
    if (attempts_[inputs.front()]++ < failures_) {
      throw Error(ErrorCode::kBackendUnavailable, "transient");
    }
    return inputs;
  }
  std::vector<double> Classify(const std::vector<std::string> &inputs) override {
    return std::vector<double>(inputs.size(), 1.0);
  }

  std::atomic<int> calls{0};

 private:
  int failures_;
  std::set<std::string> poisoned_;
  std::mutex mu_;
  std::map<std::string, int> attempts_;
};

// Echoes while recording the peak number of concurrent calls.
class ConcurrencyProbe : public Backend {
 public:
  std::vector<std::string> Generate(const std::vector<std::string> &inputs,
                                    const DecodingOptions &) override {
    int now = ++in_flight_;
    int peak = peak_.load();
    while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    --in_flight_;
    return inputs;
  }
  std::vector<double> Classify(const std::vector<std::string> &inputs) override {
    return std::vector<double>(inputs.size(), 1.0);
  }
  int peak() const { return peak_.load(); }

 private:
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
};

class ThrowingScorer : public PredicativeScorer {
 public:
  double Score(const PredicateCandidate &, const TaggedSentence &) override {
    throw Error(ErrorCode::kBackendUnavailable, "scorer down");
  }
};

std::vector<std::string> Numbered(size_t n) {
  std::vector<std::string> sources;
  for (size_t i = 0; i < n; ++i) sources.push_back("source " + std::to_string(i));
  return sources;
}

BatchConfig FastBatch(size_t size = 16, int limit = 4, int attempts = 3) {
  return {size, limit, attempts, std::chrono::milliseconds(1)};
}

TEST(TaggingTest, CoarseTags) {
  EXPECT_EQ(CoarseTag("VBD"), kVerbTag);
  EXPECT_EQ(CoarseTag("verb"), kVerbTag);
  EXPECT_EQ(CoarseTag("NNS"), kNounTag);
  EXPECT_EQ(CoarseTag("NNP"), kOtherTag);
  EXPECT_EQ(CoarseTag("ADJ"), kOtherTag);
}

TEST(TaggingTest, LexiconTaggerOnTable1) {
  TaggedSentence ts = TagTable1();
  ASSERT_EQ(ts.pos_tags.size(), Table1Tokens().size());
  EXPECT_EQ(ts.pos_tags[2], kVerbTag);    // shot
  EXPECT_EQ(ts.pos_tags[5], kNounTag);    // confrontation
  EXPECT_EQ(ts.pos_tags[11], kVerbTag);   // recovering
  EXPECT_EQ(ts.pos_tags[16], kNounTag);   // attack, after a determiner
  EXPECT_EQ(ts.pos_tags[13], kOtherTag);  // hospital
}

TEST(TaggingTest, ReadConll) {
  std::istringstream in(
      "# sent_id = first\n"
      "Both\tDT\nwere\tVBD\nshot\tVBN\n\n"
      "1\tThey\tthey\tPRON\t_\n"
      "2-3\tdon't\t_\t_\t_\n"
      "2\tdo\tdo\tAUX\t_\n"
      "3\tn't\tnot\tPART\t_\n"
      "4\trun\trun\tVERB\t_\n");
  auto sentences = ReadConll(in);
  ASSERT_EQ(sentences.size(), 2u);
  EXPECT_EQ(sentences[0].id, "first");
  EXPECT_EQ(sentences[0].pos_tags, (std::vector<std::string>{kOtherTag, kVerbTag, kVerbTag}));
  EXPECT_EQ(sentences[1].id, "s2");
  EXPECT_EQ(sentences[1].tokens, (std::vector<std::string>{"They", "do", "n't", "run"}));
  std::istringstream bad("a\tb\tc\n");
  EXPECT_THROW(ReadConll(bad), Error);
}

TEST(PredicateDetectionTest, VerbsWithoutAuxiliaries) {
  auto candidates = DetectVerbPredicates(TagTable1(), QuestionGrammar::Default().inflections());
  ASSERT_EQ(candidates.size(), 2u);
  EXPECT_EQ(candidates[0], (PredicateCandidate{2, PredicateKind::kVerbal, "shoot", {}}));
  EXPECT_EQ(candidates[1], (PredicateCandidate{11, PredicateKind::kVerbal, "recover", {}}));
}

TEST(PredicateDetectionTest, TagCountMismatch) {
  TaggedSentence ts{"x", {"a", "b"}, {kVerbTag}};
  EXPECT_THROW(DetectVerbPredicates(ts, QuestionGrammar::Default().inflections()), Error);
}

TEST(PredicateDetectionTest, NominalizationCandidates) {
  auto candidates = ExtractNominalizationCandidates(TagTable1(), Lexicon());
  ASSERT_EQ(candidates.size(), 2u);
  EXPECT_EQ(candidates[0].index, 5);
  EXPECT_EQ(candidates[0].verb_form, "confront");
  EXPECT_EQ(candidates[0].kind, PredicateKind::kNominal);
  EXPECT_EQ(candidates[1].index, 16);
  EXPECT_EQ(candidates[1].verb_form, "attack");
  TaggedSentence plain{"p", {"The", "table"}, {kOtherTag, kNounTag}};
  EXPECT_TRUE(ExtractNominalizationCandidates(plain, Lexicon()).empty());
}

TEST(ClassifyPredicativeTest, GoldAndAlwaysTrue) {
  auto qanom = LoadDataset(testing::TestdataPath("dev_qanom.jsonl"), Task::kQanom).records;
  GoldLookupScorer gold = GoldLookupScorer::FromRecords(qanom);
  const DatasetRecord &construction = qanom[3];
  ASSERT_FALSE(construction.is_predicate);
  TaggedSentence ts{construction.sentence_id, construction.tokens,
                    std::vector<std::string>(construction.tokens.size(), kOtherTag)};
  PredicateCandidate candidate{construction.predicate_index, PredicateKind::kNominal,
                               construction.verb_form, {}};
  EXPECT_FALSE(ClassifyPredicative(candidate, ts, gold, 0.5));
  AlwaysTrueScorer always;
  EXPECT_TRUE(ClassifyPredicative(candidate, ts, always, 0.0));

  TaggedSentence table1 = TagTable1();
  GoldLookupScorer table1_gold = GoldLookupScorer::FromRecords(testing::LoadTable1());
  EXPECT_TRUE(ClassifyPredicative({5, PredicateKind::kNominal, "confront", {}}, table1,
                                  table1_gold, 0.5));
}

TEST(ClassifyPredicativeTest, Errors) {
  TaggedSentence ts = TagTable1();
  AlwaysTrueScorer always;
  try {
    ClassifyPredicative({2, PredicateKind::kVerbal, "shoot", {}}, ts, always, 0.5);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
  ThrowingScorer throwing;
  try {
    ClassifyPredicative({5, PredicateKind::kNominal, "confront", {}}, ts, throwing, 0.5);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackendUnavailable);
    EXPECT_NE(std::string(e.what()).find("'confrontation' at 5 in table1"), std::string::npos)
        << e.what();
  }
}

TEST(ClassifyPredicativeTest, RemoteScorerUsesClassifierInput) {
  GoldReplayBackend backend = GoldReplayBackend::FromRecords(testing::LoadTable1());
  RemoteScorer remote(backend);
  TaggedSentence ts = TagTable1();
  EXPECT_TRUE(ClassifyPredicative({5, PredicateKind::kNominal, "confront", {}}, ts, remote, 0.5));
  EXPECT_FALSE(ClassifyPredicative({16, PredicateKind::kNominal, "attack", {}}, ts, remote, 0.5));
  EXPECT_TRUE(StartsWith(EncodeClassifierInput(ts, {5, PredicateKind::kNominal, "confront", {}}),
                         "predicative: Both were shot in the [PREDICATE] confrontation"));
}

TEST(PipelineTest, GoldReplayReproducesTable1) {
  auto gold = testing::LoadTable1();
  GoldReplayBackend backend = GoldReplayBackend::FromRecords(gold);
  RemoteScorer scorer(backend);
  QASemRecord record = ParseSentence(TagTable1(), {Task::kQasrl, Task::kQanom, Task::kDiscourse},
                                     backend, scorer);
  EXPECT_EQ(record.sentence_id, "table1");
  EXPECT_EQ(record.QaCount(), 11);
  EXPECT_EQ(record.DiagnosticCount(), 0);
  ASSERT_EQ(record.results.size(), 4u);
  for (Task task : {Task::kQasrl, Task::kQanom, Task::kDiscourse}) {
    std::vector<QAPair> expected;
    for (const auto &r : testing::RecordsOf(gold, task)) {
      expected.insert(expected.end(), r.qas.begin(), r.qas.end());
    }
    EXPECT_EQ(record.QasFor(task), expected) << TaskName(task);
  }
  for (const auto &result : record.results) {
    if (result.task == Task::kDiscourse) continue;
    for (const auto &qa : result.qas) {
      for (const auto &answer : qa.answers) {
        EXPECT_TRUE(SpanMatchesTokens(answer, record.tokens)) << answer.text;
      }
    }
  }
}

TEST(PipelineTest, TaskSelection) {
  GoldReplayBackend backend = GoldReplayBackend::FromRecords(testing::LoadTable1());
  RemoteScorer scorer(backend);
  QASemRecord record = ParseSentence(TagTable1(), {Task::kQanom}, backend, scorer);
  ASSERT_EQ(record.results.size(), 1u);
  EXPECT_EQ(record.results[0].task, Task::kQanom);
  EXPECT_EQ(record.results[0].verb_form, "confront");
  EXPECT_EQ(record.QaCount(), 2);
}

TEST(PipelineTest, EmptyOutputsGiveEmptyResults) {
  FunctionBackend backend([](const std::string &) { return std::string(); });
  AlwaysTrueScorer scorer;
  QASemRecord record = ParseSentence(TagTable1(), {Task::kQasrl, Task::kDiscourse}, backend, scorer);
  ASSERT_EQ(record.results.size(), 3u);
  EXPECT_EQ(record.QaCount(), 0);
  EXPECT_EQ(record.DiagnosticCount(), 0);
}

TEST(PipelineTest, UnalignableAnswerIsDroppedWithDiagnostic) {
  FunctionBackend backend([](const std::string &) { return std::string("Who was shot? </q> Bot"); });
  AlwaysTrueScorer scorer;
  QASemRecord record = ParseSentence(TagTable1(), {Task::kQasrl}, backend, scorer);
  ASSERT_EQ(record.results.size(), 2u);
  EXPECT_EQ(record.QaCount(), 0);
  ASSERT_EQ(record.results[0].diagnostics.size(), 1u);
  EXPECT_EQ(record.results[0].diagnostics[0].kind, DiagnosticKind::kUnalignableAnswer);
}

TEST(PipelineTest, ParseAllKeepsInputOrder) {
  FunctionBackend backend([](const std::string &input) {
    return input.find("[PREDICATE] ran") != std::string::npos ? "Who ran? </q> Kim" : "";
  });
  AlwaysTrueScorer scorer;
  const ResourceBundle &resources = BundledResources();
  PipelineConfig config;
  config.tasks = {Task::kQasrl};
  config.batch = FastBatch(2, 3);
  Pipeline pipeline(config, backend, scorer, QuestionGrammar::Default(),
                    LoadNominalizationLexicon(resources.nominalizations),
                    LoadDiscoursePrefixes(resources.discourse_prefixes));
  std::vector<TaggedSentence> sentences;
  for (int i = 0; i < 20; ++i) {
    bool ran = i % 3 == 0;
    sentences.push_back({"s" + std::to_string(i),
                         {"Kim", ran ? "ran" : "slept", "."},
                         {kOtherTag, kVerbTag, kOtherTag}});
  }
  auto records = pipeline.ParseAll(sentences);
  ASSERT_EQ(records.size(), 20u);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(records[i].sentence_id, "s" + std::to_string(i));
    EXPECT_EQ(records[i].QaCount(), i % 3 == 0 ? 1 : 0);
  }
}

TEST(PipelineTest, RecordJson) {
  GoldReplayBackend backend = GoldReplayBackend::FromRecords(testing::LoadTable1());
  RemoteScorer scorer(backend);
  QASemRecord record = ParseSentence(TagTable1(), {Task::kDiscourse}, backend, scorer);
  std::string json = QASemRecordToJson(record);
  EXPECT_NE(json.find("\"task\":\"discourse\""), std::string::npos);
  EXPECT_NE(json.find("\"text\":\"During the confrontation with police\"}"), std::string::npos);
}

TEST(GenerateBatchedTest, OrderedOutputAcrossBatches) {
  auto sources = Numbered(100);
  EchoBackend echo;
  EXPECT_EQ(GenerateBatched(sources, echo, {}, FastBatch(16, 4)), sources);
  EXPECT_TRUE(GenerateBatched({}, echo, {}, FastBatch()).empty());
}

TEST(GenerateBatchedTest, RetriesTransientFailures) {
  auto sources = Numbered(40);
  FlakyBackend flaky(2);
  EXPECT_EQ(GenerateBatched(sources, flaky, {}, FastBatch(16, 4, 3)), sources);
  EXPECT_EQ(flaky.calls.load(), 9);
}

TEST(GenerateBatchedTest, PermanentFailureNamesBatches) {
  auto sources = Numbered(40);
  FlakyBackend flaky(0, {"source 17", "source 35"});
  try {
    GenerateBatched(sources, flaky, {}, FastBatch(16, 4, 2));
    FAIL();
  } catch (const BackendUnavailableError &e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackendUnavailable);
    EXPECT_EQ(e.failed_batches(), (std::vector<size_t>{1, 2}));
  }
}

TEST(GenerateBatchedTest, WrongOutputCountIsFailure) {
  class Truncating : public Backend {
   public:
    std::vector<std::string> Generate(const std::vector<std::string> &,
                                      const DecodingOptions &) override {
      return {};
    }
    std::vector<double> Classify(const std::vector<std::string> &) override { return {}; }
  } truncating;
  EXPECT_THROW(GenerateBatched(Numbered(3), truncating, {}, FastBatch(16, 1, 1)),
               BackendUnavailableError);
}

TEST(GenerateBatchedTest, RespectsConcurrencyLimit) {
  ConcurrencyProbe probe;
  auto sources = Numbered(64);
  EXPECT_EQ(GenerateBatched(sources, probe, {}, FastBatch(2, 3)), sources);
  EXPECT_LE(probe.peak(), 3);
  EXPECT_GE(probe.peak(), 1);
  EXPECT_THROW(GenerateBatched(sources, probe, {}, FastBatch(2, 0)), Error);
}

TEST(SettingsTest, ParseConfigAndEnvironment) {
  PipelineSettings settings;
  ParsePipelineSettings(
      "# backend\n[backend]\nendpoint = \"http://localhost:8000\"\n"
      "batch_size = 8\nconcurrency = 2\nmax_attempts = 5\nbackoff_ms = 10\n"
      "timeout_ms = 1500\nbeam = 3\nmax_length = 128\nthreshold = 0.7  # tuned\n",
      settings);
  EXPECT_EQ(settings.endpoint, "http://localhost:8000");
  EXPECT_EQ(settings.config.batch.batch_size, 8u);
  EXPECT_EQ(settings.config.batch.concurrency_limit, 2);
  EXPECT_EQ(settings.config.batch.max_attempts, 5);
  EXPECT_EQ(settings.config.batch.initial_backoff, std::chrono::milliseconds(10));
  EXPECT_EQ(settings.timeout, std::chrono::milliseconds(1500));
  EXPECT_EQ(settings.config.decoding.beam, 3);
  EXPECT_EQ(settings.config.decoding.max_length, 128);
  EXPECT_DOUBLE_EQ(settings.config.threshold, 0.7);

  setenv("QASEM_BACKEND_URL", "http://other:9000", 1);
  ApplyEnvironment(settings);
  unsetenv("QASEM_BACKEND_URL");
  EXPECT_EQ(settings.endpoint, "http://other:9000");
}

TEST(SettingsTest, Errors) {
  PipelineSettings settings;
  EXPECT_THROW(ParsePipelineSettings("colour = red\n", settings), Error);
  EXPECT_THROW(ParsePipelineSettings("beam = five\n", settings), Error);
  EXPECT_THROW(ParsePipelineSettings("threshold = 2\n", settings), Error);
  EXPECT_THROW(ParsePipelineSettings("just words\n", settings), Error);
}

}  // namespace
}  // namespace qasem
