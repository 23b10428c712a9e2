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

#include <atomic>
#include <cstdlib>
#include <istream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "qasem/resources.h"

namespace qasem {

using nlohmann::json;

void TaggedSentence::Validate() const {
  if (tokens.size() != pos_tags.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "sentence '" + id + "' has " + std::to_string(tokens.size()) +
                    " tokens but " + std::to_string(pos_tags.size()) + " tags");
  }
}

std::string CoarseTag(std::string_view tag) {
  std::string upper(tag);
  for (auto &c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "VERB" || StartsWith(upper, "VB")) return kVerbTag;
  if (upper == "NOUN" || upper == "NN" || upper == "NNS") return kNounTag;
  return kOtherTag;
}

std::vector<TaggedSentence> ReadConll(std::istream &in) {
  std::vector<TaggedSentence> sentences;
  TaggedSentence current;
  auto flush = [&]() {
    if (current.tokens.empty()) {
      current.id.clear();
      return;
    }
    if (current.id.empty()) current.id = "s" + std::to_string(sentences.size() + 1);
    sentences.push_back(std::move(current));
    current = TaggedSentence();
  };
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      std::string comment = Trim(line.substr(1));
      if (StartsWith(comment, "sent_id")) {
        size_t eq = comment.find('=');
        if (eq != std::string::npos) current.id = Trim(comment.substr(eq + 1));
      }
      continue;
    }
    std::vector<std::string> columns = SplitString(line, "\t");
    if (columns.size() == 2) {
      current.tokens.push_back(columns[0]);
      current.pos_tags.push_back(CoarseTag(columns[1]));
    } else if (columns.size() >= 4) {
      const std::string &id = columns[0];
      if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) {
        continue;
      }
      current.tokens.push_back(columns[1]);
      current.pos_tags.push_back(CoarseTag(columns[3]));
    } else {
      throw Error(ErrorCode::kSchema, "line " + std::to_string(line_number) +
                                          ": expected 2 or at least 4 "
                                          "tab-separated columns");
    }
  }
  flush();
  return sentences;
}

LexiconTagger::LexiconTagger(const Inflections &inflections,
                             std::set<std::string> nominalizations,
                             std::unordered_map<std::string, std::string> lexicon)
    : inflections_(inflections),
      nominalizations_(std::move(nominalizations)),
      lexicon_(std::move(lexicon)) {}

TaggedSentence LexiconTagger::Tag(const std::vector<std::string> &tokens,
                                  const std::string &id) const {
  static const std::set<std::string> kDeterminers = {
      "the", "a", "an", "this", "that", "these", "those", "his",
      "her", "its", "their", "our", "my", "your"};
  TaggedSentence tagged;
  tagged.id = id;
  tagged.tokens = tokens;
  for (size_t i = 0; i < tokens.size(); ++i) {
    std::string lower = ToLower(tokens[i]);
    if (auto it = lexicon_.find(lower); it != lexicon_.end()) {
      tagged.pos_tags.push_back(it->second);
      continue;
    }
    std::string lemma = inflections_.Lemmatize(lower);
    bool verb = inflections_.IsKnownBase(lemma) &&
                inflections_.IsInflectionOf(lemma, lower);
    bool noun = nominalizations_.count(lower) > 0;
    if (noun && verb) {
      bool after_determiner =
          i > 0 && kDeterminers.count(ToLower(tokens[i - 1])) > 0;
      tagged.pos_tags.push_back(after_determiner ? kNounTag : kVerbTag);
    } else if (noun) {
      tagged.pos_tags.push_back(kNounTag);
    } else if (verb) {
      tagged.pos_tags.push_back(kVerbTag);
    } else {
      tagged.pos_tags.push_back(kOtherTag);
    }
  }
  return tagged;
}

const char *PredicateKindName(PredicateKind kind) {
  return kind == PredicateKind::kVerbal ? "verbal" : "nominal";
}

const std::set<std::string> &DefaultAuxiliaryStoplist() {
  static const std::set<std::string> kStoplist = {
      "be",    "am",     "is",    "are",   "was",   "were",  "been",
      "being", "'s",     "'re",   "'m",    "have",  "has",   "had",
      "having", "'ve",   "'d",    "do",    "does",  "did",   "will",
      "would", "shall",  "should", "can",  "could", "may",   "might",
      "must",  "'ll",    "wo",    "ca"};
  return kStoplist;
}

std::vector<PredicateCandidate> DetectVerbPredicates(
    const TaggedSentence &sentence, const Inflections &inflections,
    const std::set<std::string> &stoplist) {
  sentence.Validate();
  std::vector<PredicateCandidate> candidates;
  for (size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (sentence.pos_tags[i] != kVerbTag) continue;
    std::string lower = ToLower(sentence.tokens[i]);
    if (stoplist.count(lower)) continue;
    candidates.push_back({static_cast<int>(i), PredicateKind::kVerbal,
                          inflections.Lemmatize(lower), std::nullopt});
  }
  return candidates;
}

NominalizationLexicon LoadNominalizationLexicon(const std::string &tsv) {
  NominalizationLexicon lexicon;
  for (const auto &row : ParseTsvResource(tsv, 2, "nominalization lexicon")) {
    lexicon[ToLower(row[0])] = ToLower(row[1]);
  }
  return lexicon;
}

std::vector<PredicateCandidate> ExtractNominalizationCandidates(
    const TaggedSentence &sentence, const NominalizationLexicon &lexicon) {
  sentence.Validate();
  std::vector<PredicateCandidate> candidates;
  for (size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (sentence.pos_tags[i] != kNounTag) continue;
    auto it = lexicon.find(ToLower(sentence.tokens[i]));
    if (it == lexicon.end()) continue;
    candidates.push_back(
        {static_cast<int>(i), PredicateKind::kNominal, it->second, std::nullopt});
  }
  return candidates;
}

std::vector<std::string> EchoBackend::Generate(
    const std::vector<std::string> &inputs, const DecodingOptions &) {
  return inputs;
}

std::vector<double> EchoBackend::Classify(const std::vector<std::string> &inputs) {
  return std::vector<double>(inputs.size(), 1.0);
}

GoldReplayBackend GoldReplayBackend::FromRecords(
    const std::vector<DatasetRecord> &records,
    const InputEncodingConfig &predicate_encoding,
    const InputEncodingConfig &discourse_encoding) {
  GoldReplayBackend backend;
  std::vector<DatasetRecord> discourse;
  for (const auto &record : records) {
    if (record.task == Task::kDiscourse) {
      discourse.push_back(record);
      continue;
    }
    std::string source = EncodeInput(record.tokens, record.predicate_index,
                                     record.verb_form, predicate_encoding);
    backend.Add(source, LinearizeOutput(record.qas, record.task));
    if (record.task == Task::kQanom) {
      PredicateCandidate candidate{record.predicate_index, PredicateKind::kNominal,
                                   record.verb_form, std::nullopt};
      TaggedSentence sentence{record.sentence_id, record.tokens,
                              std::vector<std::string>(record.tokens.size(), kOtherTag)};
      backend.SetScore(EncodeClassifierInput(sentence, candidate),
                       record.is_predicate ? 1.0 : 0.0);
    }
  }
  for (const auto &record : GroupDiscourseBySentence(discourse)) {
    backend.Add(EncodeSentenceInput(record.tokens, discourse_encoding),
                LinearizeOutput(record.qas, Task::kDiscourse));
  }
  return backend;
}

void GoldReplayBackend::Add(const std::string &source, const std::string &target) {
  targets_[source] = target;
}

void GoldReplayBackend::SetScore(const std::string &source, double score) {
  scores_[source] = score;
}

std::vector<std::string> GoldReplayBackend::Generate(
    const std::vector<std::string> &inputs, const DecodingOptions &) {
  std::vector<std::string> outputs;
  outputs.reserve(inputs.size());
  for (const auto &input : inputs) {
    auto it = targets_.find(input);
    outputs.push_back(it == targets_.end() ? "" : it->second);
  }
  return outputs;
}

std::vector<double> GoldReplayBackend::Classify(
    const std::vector<std::string> &inputs) {
  std::vector<double> scores;
  scores.reserve(inputs.size());
  for (const auto &input : inputs) {
    auto it = scores_.find(input);
    scores.push_back(it == scores_.end() ? 0.0 : it->second);
  }
  return scores;
}

std::string GenerateRequestBody(const std::vector<std::string> &inputs,
                                const DecodingOptions &options) {
  json body = {{"inputs", inputs},
               {"beam", options.beam},
               {"max_length", options.max_length}};
  return body.dump();
}

std::string ClassifyRequestBody(const std::vector<std::string> &inputs) {
  return json{{"inputs", inputs}}.dump();
}

namespace {

json ParseResponse(const std::string &body, const char *field, size_t expected) {
  json parsed = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains(field) ||
      !parsed[field].is_array()) {
    throw Error(ErrorCode::kBackendUnavailable,
                std::string("response lacks a '") + field + "' array");
  }
  if (parsed[field].size() != expected) {
    throw Error(ErrorCode::kBackendUnavailable,
                "response has " + std::to_string(parsed[field].size()) + " " +
                    field + " for " + std::to_string(expected) + " inputs");
  }
  return parsed[field];
}

}  // namespace

std::vector<std::string> ParseGenerateResponse(const std::string &body,
                                               size_t expected) {
  json outputs = ParseResponse(body, "outputs", expected);
  std::vector<std::string> result;
  for (const auto &output : outputs) {
    if (!output.is_string()) {
      throw Error(ErrorCode::kBackendUnavailable, "non-string output");
    }
    result.push_back(output.get<std::string>());
  }
  return result;
}

std::vector<double> ParseClassifyResponse(const std::string &body,
                                          size_t expected) {
  json scores = ParseResponse(body, "scores", expected);
  std::vector<double> result;
  for (const auto &score : scores) {
    if (!score.is_number()) {
      throw Error(ErrorCode::kBackendUnavailable, "non-numeric score");
    }
    result.push_back(score.get<double>());
  }
  return result;
}

HttpBackend::HttpBackend(std::string endpoint, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {
  size_t scheme = endpoint_.find("://");
  size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  while (endpoint_.size() > host_start && EndsWith(endpoint_, "/")) endpoint_.pop_back();
  size_t slash = endpoint_.find('/', host_start);
  if (slash == std::string::npos) {
    host_ = endpoint_;
  } else {
    host_ = endpoint_.substr(0, slash);
    prefix_ = endpoint_.substr(slash);
  }
  if (host_.size() <= host_start) {
    throw Error(ErrorCode::kInvalidArgument, "bad backend endpoint '" + endpoint_ + "'");
  }
}

std::string HttpBackend::Post(const std::string &path, const std::string &body) {
  httplib::Client client(host_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  auto response = client.Post(prefix_ + path, body, "application/json");
  if (!response) {
    throw Error(ErrorCode::kBackendUnavailable,
                endpoint_ + path + ": " + httplib::to_string(response.error()));
  }
  if (response->status != 200) {
    throw Error(ErrorCode::kBackendUnavailable,
                endpoint_ + path + ": HTTP " + std::to_string(response->status));
  }
  return response->body;
}

std::vector<std::string> HttpBackend::Generate(
    const std::vector<std::string> &inputs, const DecodingOptions &options) {
  return ParseGenerateResponse(Post("/generate", GenerateRequestBody(inputs, options)),
                               inputs.size());
}

std::vector<double> HttpBackend::Classify(const std::vector<std::string> &inputs) {
  return ParseClassifyResponse(Post("/classify", ClassifyRequestBody(inputs)),
                               inputs.size());
}

bool HttpBackend::Healthy() {
  httplib::Client client(host_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  auto response = client.Get(prefix_ + "/health");
  if (!response || response->status != 200) return false;
  json body = json::parse(response->body, nullptr, false);
  return body.is_object() && body.value("status", "") == "ok";
}

std::vector<std::string> GenerateBatched(const std::vector<std::string> &sources,
                                         Backend &backend,
                                         const DecodingOptions &options,
                                         const BatchConfig &batch) {
  if (batch.concurrency_limit < 1 || batch.batch_size < 1 || batch.max_attempts < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "batch size, concurrency limit and attempts must be positive");
  }
  std::vector<std::string> outputs(sources.size());
  size_t num_batches = (sources.size() + batch.batch_size - 1) / batch.batch_size;
  std::atomic<size_t> next{0};
  std::mutex failure_mu;
  std::vector<size_t> failed;
  std::string last_error;

  auto worker = [&]() {
    for (size_t b = next++; b < num_batches; b = next++) {
      size_t begin = b * batch.batch_size;
      size_t end = std::min(sources.size(), begin + batch.batch_size);
      std::vector<std::string> inputs(sources.begin() + begin, sources.begin() + end);
      auto backoff = batch.initial_backoff;
      for (int attempt = 1;; ++attempt) {
        try {
          std::vector<std::string> result = backend.Generate(inputs, options);
          if (result.size() != inputs.size()) {
            throw Error(ErrorCode::kBackendUnavailable,
                        "backend returned " + std::to_string(result.size()) +
                            " outputs for " + std::to_string(inputs.size()) +
                            " inputs");
          }
          std::move(result.begin(), result.end(), outputs.begin() + begin);
          break;
        } catch (const std::exception &e) {
          if (attempt >= batch.max_attempts) {
            std::lock_guard<std::mutex> lock(failure_mu);
            failed.push_back(b);
            last_error = e.what();
            break;
          }
          std::this_thread::sleep_for(backoff);
          backoff *= 2;
        }
      }
    }
  };

  size_t num_workers =
      std::min(num_batches, static_cast<size_t>(batch.concurrency_limit));
  if (num_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (size_t i = 0; i < num_workers; ++i) threads.emplace_back(worker);
    for (auto &thread : threads) thread.join();
  }
  if (!failed.empty()) {
    std::sort(failed.begin(), failed.end());
    std::vector<std::string> names;
    for (size_t b : failed) names.push_back(std::to_string(b));
    throw BackendUnavailableError(
        "batches [" + Join(names, ",") + "] failed after " +
            std::to_string(batch.max_attempts) + " attempts: " + last_error,
        failed);
  }
  return outputs;
}

std::string EncodeClassifierInput(const TaggedSentence &sentence,
                                  const PredicateCandidate &candidate) {
  InputEncodingConfig cfg;
  cfg.task_prefix = "predicative: ";
  return EncodeInput(sentence.tokens, candidate.index, candidate.verb_form, cfg);
}

GoldLookupScorer GoldLookupScorer::FromRecords(
    const std::vector<DatasetRecord> &records) {
  GoldLookupScorer scorer;
  for (const auto &record : records) {
    if (record.task != Task::kQanom) continue;
    scorer.Add(record.tokens, record.predicate_index, record.is_predicate);
  }
  return scorer;
}

void GoldLookupScorer::Add(const std::vector<std::string> &tokens, int index,
                           bool predicative) {
  gold_[{Join(tokens, " "), index}] = predicative;
}

double GoldLookupScorer::Score(const PredicateCandidate &candidate,
                               const TaggedSentence &sentence) {
  auto it = gold_.find({Join(sentence.tokens, " "), candidate.index});
  return it != gold_.end() && it->second ? 1.0 : 0.0;
}

double RemoteScorer::Score(const PredicateCandidate &candidate,
                           const TaggedSentence &sentence) {
  std::vector<double> scores =
      backend_.Classify({EncodeClassifierInput(sentence, candidate)});
  if (scores.size() != 1) {
    throw Error(ErrorCode::kBackendUnavailable, "classifier returned no score");
  }
  return scores[0];
}

bool ClassifyPredicative(const PredicateCandidate &candidate,
                         const TaggedSentence &sentence,
                         PredicativeScorer &scorer, double threshold) {
  if (candidate.kind != PredicateKind::kNominal) {
    throw Error(ErrorCode::kInvalidArgument,
                "predicative classification applies to nominal candidates");
  }
  try {
    return scorer.Score(candidate, sentence) >= threshold;
  } catch (const Error &e) {
    std::string where = "candidate '" +
                        sentence.tokens.at(static_cast<size_t>(candidate.index)) +
                        "' at " + std::to_string(candidate.index);
    if (!sentence.id.empty()) where += " in " + sentence.id;
    throw Error(e.code(), where + ": " + e.what());
  }
}

int64_t QASemRecord::QaCount() const {
  int64_t count = 0;
  for (const auto &result : results) count += static_cast<int64_t>(result.qas.size());
  return count;
}

int64_t QASemRecord::DiagnosticCount() const {
  int64_t count = 0;
  for (const auto &result : results) {
    count += static_cast<int64_t>(result.diagnostics.size());
  }
  return count;
}

std::vector<QAPair> QASemRecord::QasFor(Task task) const {
  std::vector<QAPair> qas;
  for (const auto &result : results) {
    if (result.task != task) continue;
    qas.insert(qas.end(), result.qas.begin(), result.qas.end());
  }
  return qas;
}

std::string QASemRecordToJson(const QASemRecord &record) {
  json results = json::array();
  for (const auto &result : record.results) {
    json entry = {{"task", TaskName(result.task)}};
    if (result.task != Task::kDiscourse) {
      entry["predicate_index"] = result.predicate_index;
      entry["verb_form"] = result.verb_form;
    }
    json qas = json::array();
    for (const auto &qa : result.qas) {
      json answers = json::array();
      for (const auto &answer : qa.answers) {
        json a = {{"text", answer.text}};
        if (answer.aligned()) {
          a["start"] = answer.start_token;
          a["end"] = answer.end_token;
        }
        answers.push_back(a);
      }
      qas.push_back({{"question", qa.question}, {"answers", answers}});
    }
    entry["qas"] = qas;
    json diagnostics = json::array();
    for (const auto &d : result.diagnostics) {
      diagnostics.push_back({{"kind", DiagnosticKindName(d.kind)},
                             {"fragment", d.fragment},
                             {"detail", d.detail},
                             {"qa_index", d.qa_index}});
    }
    entry["diagnostics"] = diagnostics;
    results.push_back(entry);
  }
  json j = {{"sentence_id", record.sentence_id},
            {"tokens", record.tokens},
            {"results", results}};
  return j.dump();
}

void ParsePipelineSettings(const std::string &content, PipelineSettings &settings) {
  std::istringstream in(content);
  std::string line;
  int line_number = 0;
  auto fail = [&](const std::string &what) {
    throw Error(ErrorCode::kSchema,
                "config line " + std::to_string(line_number) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_number;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty() || (line.front() == '[' && line.back() == ']')) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    auto as_int = [&]() {
      try {
        size_t used = 0;
        long parsed = std::stol(value, &used);
        if (used != value.size() || parsed < 0) fail("bad integer '" + value + "'");
        return parsed;
      } catch (const std::logic_error &) {
        fail("bad integer '" + value + "'");
      }
      return 0L;
    };
    PipelineConfig &cfg = settings.config;
    if (key == "endpoint" || key == "url") {
      settings.endpoint = value;
    } else if (key == "batch_size") {
      cfg.batch.batch_size = static_cast<size_t>(as_int());
    } else if (key == "concurrency" || key == "concurrency_limit") {
      cfg.batch.concurrency_limit = static_cast<int>(as_int());
    } else if (key == "max_attempts") {
      cfg.batch.max_attempts = static_cast<int>(as_int());
    } else if (key == "backoff_ms") {
      cfg.batch.initial_backoff = std::chrono::milliseconds(as_int());
    } else if (key == "timeout_ms") {
      settings.timeout = std::chrono::milliseconds(as_int());
    } else if (key == "beam") {
      cfg.decoding.beam = static_cast<int>(as_int());
    } else if (key == "max_length") {
      cfg.decoding.max_length = static_cast<int>(as_int());
    } else if (key == "threshold") {
      try {
        cfg.threshold = std::stod(value);
      } catch (const std::logic_error &) {
        fail("bad threshold '" + value + "'");
      }
      if (cfg.threshold < 0.0 || cfg.threshold > 1.0) fail("threshold outside [0, 1]");
    } else {
      fail("unknown key '" + key + "'");
    }
  }
}

void ApplyEnvironment(PipelineSettings &settings) {
  const char *url = std::getenv("QASEM_BACKEND_URL");
  if (url != nullptr && *url != '\0') settings.endpoint = url;
}

Pipeline::Pipeline(PipelineConfig config, Backend &backend,
                   PredicativeScorer &scorer, const QuestionGrammar &grammar,
                   NominalizationLexicon lexicon,
                   std::vector<DiscoursePrefix> prefixes)
    : config_(std::move(config)),
      backend_(backend),
      scorer_(scorer),
      grammar_(grammar),
      lexicon_(std::move(lexicon)),
      prefixes_(std::move(prefixes)) {}

std::vector<PredicateCandidate> Pipeline::Candidates(const TaggedSentence &sentence) {
  std::vector<PredicateCandidate> candidates;
  if (config_.tasks.count(Task::kQasrl)) {
    candidates = DetectVerbPredicates(sentence, grammar_.inflections(),
                                      config_.auxiliary_stoplist);
  }
  if (config_.tasks.count(Task::kQanom)) {
    for (auto &candidate : ExtractNominalizationCandidates(sentence, lexicon_)) {
      if (ClassifyPredicative(candidate, sentence, scorer_, config_.threshold)) {
        candidates.push_back(std::move(candidate));
      }
    }
  }
  return candidates;
}

void Pipeline::CollectJobs(const TaggedSentence &sentence, size_t position,
                           std::vector<Job> &jobs) {
  for (const auto &candidate : Candidates(sentence)) {
    Job job;
    job.sentence = position;
    job.task = candidate.kind == PredicateKind::kVerbal ? Task::kQasrl : Task::kQanom;
    job.predicate_index = candidate.index;
    job.verb_form = candidate.verb_form;
    job.source = EncodeInput(sentence.tokens, candidate.index, candidate.verb_form,
                             config_.predicate_encoding);
    jobs.push_back(std::move(job));
  }
  if (config_.tasks.count(Task::kDiscourse)) {
    Job job;
    job.sentence = position;
    job.task = Task::kDiscourse;
    job.source = EncodeSentenceInput(sentence.tokens, config_.discourse_encoding);
    jobs.push_back(std::move(job));
  }
}

TaskResult Pipeline::Assemble(const Job &job, const TaggedSentence &sentence,
                              const std::string &output) const {
  TaskResult result;
  result.task = job.task;
  result.predicate_index = job.predicate_index;
  result.verb_form = job.verb_form;
  DelinearizeOptions options;
  options.grammar = &grammar_;
  options.verb_form = job.verb_form;
  options.prefixes = &prefixes_;
  DelinearizeResult parsed =
      DelinearizeOutput(output, sentence.tokens, job.task, options);
  result.diagnostics = std::move(parsed.diagnostics);
  if (job.task == Task::kDiscourse) {
    result.qas = std::move(parsed.qas);
    return result;
  }
  // Predicate-level answers must be sentence spans; unaligned ones are
  // already reported and are dropped here.
  for (auto &qa : parsed.qas) {
    std::erase_if(qa.answers, [](const AnswerSpan &a) { return !a.aligned(); });
    if (!qa.answers.empty()) result.qas.push_back(std::move(qa));
  }
  return result;
}

QASemRecord Pipeline::Parse(const TaggedSentence &sentence) {
  return std::move(ParseAll({sentence}).front());
}

std::vector<QASemRecord> Pipeline::ParseAll(
    const std::vector<TaggedSentence> &sentences) {
  std::vector<Job> jobs;
  for (size_t i = 0; i < sentences.size(); ++i) {
    sentences[i].Validate();
    CollectJobs(sentences[i], i, jobs);
  }
  std::vector<std::string> sources;
  sources.reserve(jobs.size());
  for (const auto &job : jobs) sources.push_back(job.source);
  std::vector<std::string> outputs =
      GenerateBatched(sources, backend_, config_.decoding, config_.batch);

  std::vector<QASemRecord> records(sentences.size());
  for (size_t i = 0; i < sentences.size(); ++i) {
    records[i].sentence_id = sentences[i].id;
    records[i].tokens = sentences[i].tokens;
  }
  for (size_t j = 0; j < jobs.size(); ++j) {
    const Job &job = jobs[j];
    records[job.sentence].results.push_back(
        Assemble(job, sentences[job.sentence], outputs[j]));
  }
  return records;
}

QASemRecord ParseSentence(const TaggedSentence &sentence,
                          const std::set<Task> &tasks, Backend &backend,
                          PredicativeScorer &scorer, const PipelineConfig &config) {
  const ResourceBundle &resources = BundledResources();
  PipelineConfig cfg = config;
  cfg.tasks = tasks;
  Pipeline pipeline(cfg, backend, scorer, QuestionGrammar::Default(),
                    LoadNominalizationLexicon(resources.nominalizations),
                    LoadDiscoursePrefixes(resources.discourse_prefixes));
  return pipeline.Parse(sentence);
}

}  // namespace qasem
