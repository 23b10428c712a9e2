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

#include "cli.h"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qasem/dataset.h"
#include "qasem/metrics.h"
#include "qasem/pipeline.h"
#include "qasem/question_grammar.h"
#include "qasem/resources.h"

namespace qasem::cli {

ValidityCounts &ValidityCounts::operator+=(const ValidityCounts &other) {
  valid += other.valid;
  malformed_sequence += other.malformed_sequence;
  unalignable_answer += other.unalignable_answer;
  unparseable_question += other.unparseable_question;
  return *this;
}

ValidityCounts PartitionOutput(const DelinearizeResult &result) {
  ValidityCounts counts;
  std::vector<Validity> verdicts(result.qas.size(), Validity::kValid);
  auto severity = [](Validity v) {
    switch (v) {
      case Validity::kValid: return 0;
      case Validity::kUnalignableAnswer: return 1;
      case Validity::kUnparseableQuestion: return 2;
      case Validity::kMalformedSequence: return 3;
    }
    return 0;
  };
  for (const auto &d : result.diagnostics) {
    Validity verdict = Validity::kMalformedSequence;
    if (d.kind == DiagnosticKind::kUnalignableAnswer) {
      verdict = Validity::kUnalignableAnswer;
    } else if (d.kind == DiagnosticKind::kUnparseableQuestion ||
               d.kind == DiagnosticKind::kNoPrefix) {
      verdict = Validity::kUnparseableQuestion;
    }
    if (d.qa_index < 0 || static_cast<size_t>(d.qa_index) >= verdicts.size()) {
      ++counts.malformed_sequence;
      continue;
    }
    Validity &current = verdicts[static_cast<size_t>(d.qa_index)];
    if (severity(verdict) > severity(current)) current = verdict;
  }
  for (Validity v : verdicts) {
    switch (v) {
      case Validity::kValid: ++counts.valid; break;
      case Validity::kMalformedSequence: ++counts.malformed_sequence; break;
      case Validity::kUnalignableAnswer: ++counts.unalignable_answer; break;
      case Validity::kUnparseableQuestion: ++counts.unparseable_question; break;
    }
  }
  return counts;
}

namespace {

using nlohmann::json;

enum class OutputFormat { kText, kJson, kTsv };

const std::map<std::string, OutputFormat> kOutputFormats = {
    {"text", OutputFormat::kText}, {"json", OutputFormat::kJson}, {"tsv", OutputFormat::kTsv}};

// One report row; numeric values are written unquoted in JSON.
struct Row {
  std::string key;
  std::string value;
  bool numeric = true;
};

std::string Fixed(double value, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << value;
  return ss.str();
}

void EmitRows(const std::vector<Row> &rows, OutputFormat format, std::ostream &out) {
  if (format == OutputFormat::kJson) {
    out << "{";
    for (size_t i = 0; i < rows.size(); ++i) {
      out << (i ? ", " : "") << json(rows[i].key).dump() << ": "
          << (rows[i].numeric ? rows[i].value : json(rows[i].value).dump());
    }
    out << "}\n";
    return;
  }
  const char *sep = format == OutputFormat::kTsv ? "\t" : " ";
  for (const auto &row : rows) out << row.key << sep << row.value << "\n";
}

void EmitReport(const ScoreReport &report, OutputFormat format, std::ostream &out) {
  switch (format) {
    case OutputFormat::kText: out << report.ToText(); break;
    case OutputFormat::kJson: out << report.ToJson() << "\n"; break;
    case OutputFormat::kTsv: out << report.ToTsv(); break;
  }
}

// Lexical resources and the objects built from them.
struct Toolkit {
  ResourceBundle bundle;
  std::unique_ptr<QuestionGrammar> grammar;
  std::vector<DiscoursePrefix> prefixes;
  NominalizationLexicon lexicon;

  explicit Toolkit(const std::string &directory)
      : bundle(directory.empty() ? BundledResources()
                                 : LoadResourceDirectory(directory)),
        grammar(std::make_unique<QuestionGrammar>(QuestionGrammar::FromResources(bundle))),
        prefixes(LoadDiscoursePrefixes(bundle.discourse_prefixes)),
        lexicon(LoadNominalizationLexicon(bundle.nominalizations)) {}
};

// Stream selected by --output, falling back to `out`.
class OutputTarget {
 public:
  OutputTarget(const std::string &path, std::ostream &fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw Error(ErrorCode::kIo, "cannot write " + path);
    stream_ = &file_;
  }
  std::ostream &stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream *stream_;
};

Task TaskFlag(const std::string &name) { return ParseTask(name); }

void ReportLoadDiagnostics(const std::vector<LoadDiagnostic> &diagnostics,
                           const std::string &path, std::ostream &err) {
  for (const auto &d : diagnostics) {
    err << path << ":" << d.line << ": skipped " << d.key << ": " << d.message << "\n";
  }
}

// ---------------------------------------------------------------- prepare

struct PrepareOptions {
  std::string task;
  std::string input;
  std::string format = "auto";
  std::string output;
  std::string order;
  std::string permute;
  size_t max_permutations = 10;
  size_t count = 3;
  uint64_t seed = 0;
  std::string marker = "both";
  std::string joint_nominal;
  int duplication = 14;
  std::string task_signal = "none";
  std::string pairs_format = "tsv";
};

InputEncodingConfig::MarkerMode ParseMarkerMode(const std::string &name) {
  if (name == "both") return InputEncodingConfig::MarkerMode::kMarkerBoth;
  if (name == "before") return InputEncodingConfig::MarkerMode::kMarkerBefore;
  if (name == "after") return InputEncodingConfig::MarkerMode::kMarkerAfter;
  if (name == "append") return InputEncodingConfig::MarkerMode::kAppendTarget;
  throw Error(ErrorCode::kInvalidArgument, "unknown marker mode '" + name + "'");
}

EmissionConfig BuildEmissionConfig(const PrepareOptions &opts) {
  EmissionConfig cfg;
  if (!opts.permute.empty()) {
    PermutationScheme scheme;
    if (opts.permute == "all") {
      scheme.kind = PermutationScheme::Kind::kAll;
    } else if (opts.permute == "fixed") {
      scheme.kind = PermutationScheme::Kind::kFixed;
    } else {
      scheme.kind = PermutationScheme::Kind::kLinear;
    }
    scheme.max_permutations = opts.max_permutations;
    scheme.count = opts.count;
    scheme.seed = opts.seed;
    cfg.permutations = scheme;
  } else {
    LinearizationStrategy strategy;
    if (opts.order == "answer") {
      strategy.kind = LinearizationStrategy::Kind::kAnswerOrder;
    } else if (opts.order == "random") {
      strategy.kind = LinearizationStrategy::Kind::kRandomOrder;
    } else {
      strategy.kind = LinearizationStrategy::Kind::kRoleOrder;
    }
    strategy.seed = opts.seed;
    cfg.order = strategy;
  }
  cfg.predicate_encoding.marker_mode = ParseMarkerMode(opts.marker);
  return cfg;
}

int RunPrepare(const PrepareOptions &opts, std::ostream &out, std::ostream &err) {
  Task task = TaskFlag(opts.task);
  DatasetFormat format = ParseDatasetFormat(opts.format);
  LoadedDataset data = LoadDataset(opts.input, task, format);
  ReportLoadDiagnostics(data.diagnostics, opts.input, err);
  EmissionConfig cfg = BuildEmissionConfig(opts);

  EmissionResult emitted;
  if (!opts.joint_nominal.empty()) {
    if (task != Task::kQasrl) {
      throw Error(ErrorCode::kInvalidArgument, "--joint-nominal requires --task qasrl");
    }
    LoadedDataset nominal = LoadDataset(opts.joint_nominal, Task::kQanom, format);
    ReportLoadDiagnostics(nominal.diagnostics, opts.joint_nominal, err);
    JointCorpusConfig joint;
    joint.duplication_factor = opts.duplication;
    joint.task_signal = ParseTaskSignal(opts.task_signal);
    joint.seed = opts.seed;
    std::vector<JointEntry> corpus = BuildJointCorpus(data.records, nominal.records, joint);
    JointQuestionCounts counts = CountJointQuestions(corpus);
    err << "joint corpus: " << corpus.size() << " entries, verbal questions "
        << counts.verbal << ", nominal questions " << counts.nominal << "\n";
    emitted = EmitJointTrainingPairs(corpus, joint, cfg);
  } else {
    emitted = EmitTrainingPairs(data.records, cfg);
  }
  for (const auto &d : emitted.diagnostics) err << "skipped " << d << "\n";

  OutputTarget target(opts.output, out);
  std::ostream &stream = target.stream();
  for (const auto &pair : emitted.pairs) {
    if (opts.pairs_format == "tsv") {
      stream << pair.source << "\t" << pair.target << "\n";
    } else {
      stream << json{{"source", pair.source}, {"target", pair.target}}.dump() << "\n";
    }
  }
  err << "pairs " << emitted.pairs.size() << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------ stats

struct StatsOptions {
  std::string task;
  std::vector<std::string> inputs;
  std::string format = "auto";
  std::string split;
  std::string output_format = "text";
};

int RunStats(const StatsOptions &opts, std::ostream &out, std::ostream &err) {
  Task task = TaskFlag(opts.task);
  DatasetFormat format = ParseDatasetFormat(opts.format);
  StatsAccumulator acc;
  size_t skipped = 0;
  for (const auto &path : opts.inputs) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
    auto diagnostics = ReadDataset(in, task, format,
                                   [&](DatasetRecord &&record) {
                                     // Mixed files count only the requested task.
                                     if (record.task == task) acc.Add(record);
                                   });
    ReportLoadDiagnostics(diagnostics, path, err);
    skipped += diagnostics.size();
  }
  CorpusStats stats = acc.Result();
  std::vector<Row> rows = {{"task", TaskName(task), false}};
  if (!opts.split.empty()) rows.push_back({"split", opts.split, false});
  rows.push_back({"sentences", std::to_string(stats.sentences)});
  rows.push_back({"predicates", std::to_string(stats.predicates)});
  rows.push_back({"questions", std::to_string(stats.questions)});
  rows.push_back({"answers", std::to_string(stats.answers)});
  rows.push_back({"skipped_records", std::to_string(skipped)});
  EmitRows(rows, kOutputFormats.at(opts.output_format), out);
  return kExitOk;
}

// ------------------------------------------------------------------ parse

struct ParseOptions {
  std::string conll;
  std::string tokens;
  std::vector<std::string> tasks = {"all"};
  std::string config;
  std::string endpoint;
  std::vector<std::string> gold_replay;
  bool echo = false;
  std::string scorer = "auto";
  std::optional<double> threshold;
  std::string resources;
  std::string output;
  std::string output_format = "json";
};

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::set<Task> ParseTaskSet(const std::vector<std::string> &names) {
  std::set<Task> tasks;
  for (const auto &name : names) {
    if (ToLower(name) == "all") {
      tasks.insert({Task::kQasrl, Task::kQanom, Task::kDiscourse});
    } else {
      tasks.insert(ParseTask(name));
    }
  }
  return tasks;
}

void WriteRecordText(const QASemRecord &record, std::ostream &out) {
  out << record.sentence_id << "\t" << Join(record.tokens, " ") << "\n";
  for (const auto &result : record.results) {
    out << "  [" << TaskName(result.task);
    if (result.task != Task::kDiscourse) {
      out << " " << result.verb_form << "@" << result.predicate_index;
    }
    out << "]\n";
    for (const auto &qa : result.qas) {
      std::vector<std::string> answers;
      for (const auto &a : qa.answers) answers.push_back(a.text);
      out << "    " << qa.question << " -> " << Join(answers, " ; ") << "\n";
    }
    for (const auto &d : result.diagnostics) {
      out << "    ! " << DiagnosticKindName(d.kind) << ": " << d.fragment << "\n";
    }
  }
}

void WriteRecordTsv(const QASemRecord &record, std::ostream &out) {
  for (const auto &result : record.results) {
    for (const auto &qa : result.qas) {
      std::vector<std::string> answers;
      for (const auto &a : qa.answers) answers.push_back(a.text);
      out << record.sentence_id << "\t" << TaskName(result.task) << "\t"
          << result.predicate_index << "\t" << result.verb_form << "\t"
          << qa.question << "\t" << Join(answers, " ; ") << "\n";
    }
  }
}

int RunParse(const ParseOptions &opts, std::ostream &out, std::ostream &err) {
  Toolkit toolkit(opts.resources);
  PipelineSettings settings;
  if (!opts.config.empty()) ParsePipelineSettings(ReadFile(opts.config), settings);
  ApplyEnvironment(settings);
  if (!opts.endpoint.empty()) settings.endpoint = opts.endpoint;
  if (opts.threshold) settings.config.threshold = *opts.threshold;
  settings.config.tasks = ParseTaskSet(opts.tasks);

  std::vector<TaggedSentence> sentences;
  if (!opts.conll.empty()) {
    std::ifstream in(opts.conll);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + opts.conll);
    sentences = ReadConll(in);
  } else {
    std::set<std::string> nouns;
    for (const auto &[noun, verb] : toolkit.lexicon) nouns.insert(noun);
    LexiconTagger tagger(toolkit.grammar->inflections(), nouns);
    std::istringstream in(ReadFile(opts.tokens));
    std::string line;
    while (std::getline(in, line)) {
      std::vector<std::string> words = SplitWhitespace(line);
      if (words.empty()) continue;
      sentences.push_back(tagger.Tag(words, "s" + std::to_string(sentences.size() + 1)));
    }
  }

  std::vector<DatasetRecord> gold;
  for (const auto &path : opts.gold_replay) {
    LoadedDataset loaded = LoadDataset(path, Task::kQasrl);
    ReportLoadDiagnostics(loaded.diagnostics, path, err);
    gold.insert(gold.end(), std::make_move_iterator(loaded.records.begin()),
                std::make_move_iterator(loaded.records.end()));
  }

  std::unique_ptr<Backend> backend;
  if (!opts.gold_replay.empty()) {
    backend = std::make_unique<GoldReplayBackend>(GoldReplayBackend::FromRecords(
        gold, settings.config.predicate_encoding, settings.config.discourse_encoding));
  } else if (opts.echo) {
    backend = std::make_unique<EchoBackend>();
  } else if (!settings.endpoint.empty()) {
    backend = std::make_unique<HttpBackend>(settings.endpoint, settings.timeout);
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "no backend: pass --endpoint, --config, --gold-replay or --echo, "
                "or set QASEM_BACKEND_URL");
  }

  std::string scorer_name = opts.scorer;
  if (scorer_name == "auto") {
    scorer_name = settings.endpoint.empty() || !opts.gold_replay.empty() || opts.echo
                      ? "always"
                      : "remote";
    if (scorer_name == "always" && settings.config.tasks.count(Task::kQanom)) {
      err << "warning: offline mode, every nominalization candidate is treated "
             "as predicative\n";
    }
  }
  std::unique_ptr<PredicativeScorer> scorer;
  if (scorer_name == "always") {
    scorer = std::make_unique<AlwaysTrueScorer>();
  } else if (scorer_name == "gold") {
    scorer = std::make_unique<GoldLookupScorer>(GoldLookupScorer::FromRecords(gold));
  } else {
    scorer = std::make_unique<RemoteScorer>(*backend);
  }

  Pipeline pipeline(settings.config, *backend, *scorer, *toolkit.grammar,
                    toolkit.lexicon, toolkit.prefixes);
  std::vector<QASemRecord> records = pipeline.ParseAll(sentences);

  OutputTarget target(opts.output, out);
  OutputFormat format = kOutputFormats.at(opts.output_format);
  int64_t qas = 0;
  int64_t diagnostics = 0;
  for (const auto &record : records) {
    qas += record.QaCount();
    diagnostics += record.DiagnosticCount();
    switch (format) {
      case OutputFormat::kJson: target.stream() << QASemRecordToJson(record) << "\n"; break;
      case OutputFormat::kText: WriteRecordText(record, target.stream()); break;
      case OutputFormat::kTsv: WriteRecordTsv(record, target.stream()); break;
    }
  }
  double rate = qas + diagnostics == 0
                    ? 0.0
                    : 100.0 * static_cast<double>(diagnostics) /
                          static_cast<double>(qas + diagnostics);
  err << "sentences " << records.size() << ", qas " << qas << ", diagnostics "
      << diagnostics << " (" << Fixed(rate, 1) << "%)\n";
  return diagnostics > 0 ? kExitDiagnostics : kExitOk;
}

// --------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::string task;
  std::string pred;
  std::string gold;
  std::string format = "auto";
  std::string output_format = "text";
  std::optional<double> gamma;
  std::string resources;
};

// Records keyed for pairing predictions with gold; discourse records are
// merged per sentence first. Keys keep first-seen order.
std::vector<std::pair<std::string, DatasetRecord>> KeyedRecords(
    std::vector<DatasetRecord> records, Task task) {
  if (task == Task::kDiscourse) records = GroupDiscourseBySentence(records);
  std::vector<std::pair<std::string, DatasetRecord>> keyed;
  std::map<std::string, size_t> index;
  for (auto &record : records) {
    std::string key = record.Key();
    auto [it, inserted] = index.emplace(key, keyed.size());
    if (inserted) {
      keyed.emplace_back(key, std::move(record));
    } else {
      auto &qas = keyed[it->second].second.qas;
      qas.insert(qas.end(), record.qas.begin(), record.qas.end());
    }
  }
  return keyed;
}

LoadedDataset LoadForTask(const std::string &path, Task task, DatasetFormat format,
                          std::ostream &err) {
  LoadedDataset loaded = LoadDataset(path, task, format);
  ReportLoadDiagnostics(loaded.diagnostics, path, err);
  std::erase_if(loaded.records, [&](const DatasetRecord &r) { return r.task != task; });
  return loaded;
}

int RunEvaluate(const EvaluateOptions &opts, std::ostream &out, std::ostream &err) {
  Task task = TaskFlag(opts.task);
  DatasetFormat format = ParseDatasetFormat(opts.format);
  Toolkit toolkit(opts.resources);
  LoadedDataset pred = LoadForTask(opts.pred, task, format, err);
  LoadedDataset gold = LoadForTask(opts.gold, task, format, err);
  MatchConfig cfg = MatchConfig::ForTask(task);
  if (opts.gamma) cfg.gamma = *opts.gamma;

  auto pred_keyed = KeyedRecords(std::move(pred.records), task);
  auto gold_keyed = KeyedRecords(std::move(gold.records), task);
  std::map<std::string, const DatasetRecord *> pred_by_key;
  for (const auto &[key, record] : pred_keyed) pred_by_key[key] = &record;

  ScoreReport total;
  total.task = task;
  auto score = [&](const std::vector<QAPair> &p, const DatasetRecord &reference) {
    if (task == Task::kDiscourse) {
      total += ScoreDiscourse(p, reference.qas, cfg, toolkit.prefixes);
    } else {
      total += ScoreUaLa(p, reference.qas, reference.verb_form, cfg, *toolkit.grammar);
    }
  };
  std::set<std::string> seen;
  for (const auto &[key, record] : gold_keyed) {
    seen.insert(key);
    auto it = pred_by_key.find(key);
    score(it == pred_by_key.end() ? std::vector<QAPair>() : it->second->qas, record);
  }
  // Predictions for predicates absent from gold are all false positives.
  for (const auto &[key, record] : pred_keyed) {
    if (seen.count(key)) continue;
    DatasetRecord empty = record;
    empty.qas.clear();
    score(record.qas, empty);
  }
  EmitReport(total, kOutputFormats.at(opts.output_format), out);
  for (const auto &d : total.diagnostics) err << "diagnostic: " << d << "\n";
  bool clean = total.diagnostics.empty() && pred.diagnostics.empty() &&
               gold.diagnostics.empty();
  return clean ? kExitOk : kExitDiagnostics;
}

// --------------------------------------------------------------- validate

struct ValidateOptions {
  std::string task;
  std::string pred;
  std::string output_format = "text";
  std::string resources;
};

int RunValidate(const ValidateOptions &opts, std::ostream &out, std::ostream &err) {
  Task default_task = TaskFlag(opts.task);
  Toolkit toolkit(opts.resources);
  std::ifstream in(opts.pred);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + opts.pred);
  ValidityCounts counts;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    json row = json::parse(line, nullptr, false);
    if (row.is_discarded() || !row.is_object()) {
      throw Error(ErrorCode::kSchema,
                  opts.pred + ":" + std::to_string(line_number) + ": not a JSON object");
    }
    std::string output;
    DatasetRecord record;
    try {
      if (row.contains("output")) {
        output = row["output"].get<std::string>();
        row.erase("output");
        if (!row.contains("qas")) row["qas"] = json::array();
      }
      record = RecordFromJson(row.dump(), default_task);
    } catch (const std::exception &e) {
      throw Error(ErrorCode::kSchema,
                  opts.pred + ":" + std::to_string(line_number) + ": " + e.what());
    }
    if (output.empty() && !record.qas.empty()) {
      try {
        output = LinearizeOutput(record.qas, record.task);
      } catch (const Error &e) {
        err << record.Key() << "\t" << ErrorCodeName(e.code()) << "\t" << e.what() << "\n";
        counts.malformed_sequence += static_cast<int64_t>(record.qas.size());
        continue;
      }
    }
    DelinearizeOptions options;
    options.grammar = toolkit.grammar.get();
    options.verb_form = record.verb_form;
    options.prefixes = &toolkit.prefixes;
    DelinearizeResult result =
        DelinearizeOutput(output, record.tokens, record.task, options);
    for (const auto &d : result.diagnostics) {
      err << record.Key() << "\t" << DiagnosticKindName(d.kind) << "\t" << d.fragment
          << "\n";
    }
    counts += PartitionOutput(result);
  }
  int64_t invalid = counts.total() - counts.valid;
  double rate = counts.total() == 0 ? 0.0
                                    : 100.0 * static_cast<double>(invalid) /
                                          static_cast<double>(counts.total());
  std::vector<Row> rows = {
      {"task", TaskName(default_task), false},
      {"total", std::to_string(counts.total())},
      {"valid", std::to_string(counts.valid)},
      {"malformed_sequence", std::to_string(counts.malformed_sequence)},
      {"unalignable_answer", std::to_string(counts.unalignable_answer)},
      {"unparseable_question", std::to_string(counts.unparseable_question)},
      {"invalid_rate", Fixed(rate, 1)},
  };
  EmitRows(rows, kOutputFormats.at(opts.output_format), out);
  return invalid > 0 ? kExitDiagnostics : kExitOk;
}

// ------------------------------------------------------ analyze-positions

struct PositionOptions {
  std::string task;
  std::string pred;
  std::string gold;
  std::string format = "auto";
  std::string output_format = "tsv";
  std::string resources;
};

int RunAnalyzePositions(const PositionOptions &opts, std::ostream &out,
                        std::ostream &err) {
  Task task = TaskFlag(opts.task);
  DatasetFormat format = ParseDatasetFormat(opts.format);
  Toolkit toolkit(opts.resources);
  auto pred = KeyedRecords(LoadForTask(opts.pred, task, format, err).records, task);
  auto gold = KeyedRecords(LoadForTask(opts.gold, task, format, err).records, task);
  std::map<std::string, const DatasetRecord *> gold_by_key;
  for (const auto &[key, record] : gold) gold_by_key[key] = &record;
  std::vector<PositionInstance> instances;
  for (const auto &[key, record] : pred) {
    auto it = gold_by_key.find(key);
    instances.push_back(
        {record.qas, it == gold_by_key.end() ? std::vector<QAPair>() : it->second->qas});
  }
  std::vector<PositionBucket> buckets =
      PositionPrecision(instances, MatchConfig::ForTask(task), &toolkit.prefixes);
  OutputFormat output = kOutputFormats.at(opts.output_format);
  if (output == OutputFormat::kJson) {
    json rows = json::array();
    for (const auto &b : buckets) {
      rows.push_back({{"position", b.position},
                      {"precision", b.precision},
                      {"aligned", b.aligned},
                      {"support", b.support}});
    }
    out << rows.dump() << "\n";
  } else {
    const char *sep = output == OutputFormat::kTsv ? "\t" : " ";
    out << "position" << sep << "precision" << sep << "aligned" << sep << "support\n";
    for (const auto &b : buckets) {
      out << b.position << sep << Fixed(b.precision, 4) << sep << b.aligned << sep
          << b.support << "\n";
    }
  }
  return kExitOk;
}

void AddOutputFormat(CLI::App *sub, std::string &target) {
  sub->add_option("--output-format", target, "Report format")
      ->check(CLI::IsMember({"text", "json", "tsv"}))
      ->capture_default_str();
}

CLI::Option *AddTask(CLI::App *sub, std::string &target) {
  return sub->add_option("--task", target, "qasrl, qanom or discourse")
      ->required()
      ->check(CLI::IsMember({"qasrl", "qanom", "discourse"}));
}

void PrintUsageError(const CLI::App &app, const CLI::ParseError &e, std::ostream &err) {
  err << "error: " << e.what() << "\n\n";
  for (const CLI::App *sub : app.get_subcommands()) {
    if (sub->parsed()) {
      err << sub->help();
      return;
    }
  }
  err << app.help();
}

}  // namespace

int Run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"QASem toolkit: data preparation, parsing and evaluation"};
  app.name("qasem");
  app.require_subcommand(1, 1);

  PrepareOptions prepare;
  CLI::App *prepare_cmd =
      app.add_subcommand("prepare", "Emit source/target training pairs");
  AddTask(prepare_cmd, prepare.task);
  prepare_cmd->add_option("--input", prepare.input, "Gold dataset")->required();
  prepare_cmd->add_option("--format", prepare.format, "auto, canonical, qasrl-v2 or qa-rows")
      ->capture_default_str();
  prepare_cmd->add_option("--output,-o", prepare.output, "Output file (default stdout)");
  CLI::Option *order = prepare_cmd
      ->add_option("--order", prepare.order, "Fixed QA order: role, answer or random")
      ->check(CLI::IsMember({"role", "answer", "random"}));
  CLI::Option *permute = prepare_cmd
      ->add_option("--permute", prepare.permute, "Augmentation: all, fixed or linear")
      ->check(CLI::IsMember({"all", "fixed", "linear"}));
  order->excludes(permute);
  permute->excludes(order);
  prepare_cmd->add_option("--max-permutations", prepare.max_permutations,
                          "Cap for --permute all")->capture_default_str();
  prepare_cmd->add_option("--count", prepare.count, "Orderings for --permute fixed")
      ->capture_default_str();
  prepare_cmd->add_option("--seed", prepare.seed, "Random seed")->capture_default_str();
  prepare_cmd->add_option("--marker", prepare.marker, "both, before, after or append")
      ->check(CLI::IsMember({"both", "before", "after", "append"}))
      ->capture_default_str();
  prepare_cmd->add_option("--joint-nominal", prepare.joint_nominal,
                          "QANom dataset to mix into a joint QA-SRL corpus");
  prepare_cmd->add_option("--duplication", prepare.duplication,
                          "Copies of each QANom record in a joint corpus")
      ->capture_default_str();
  prepare_cmd->add_option("--task-signal", prepare.task_signal,
                          "Joint task signal: none, prefix, marker or output")
      ->check(CLI::IsMember({"none", "prefix", "marker", "output"}))
      ->capture_default_str();
  prepare_cmd->add_option("--pairs-format", prepare.pairs_format, "jsonl or tsv")
      ->check(CLI::IsMember({"jsonl", "tsv"}))
      ->capture_default_str();

  StatsOptions stats;
  CLI::App *stats_cmd = app.add_subcommand("stats", "Corpus statistics");
  AddTask(stats_cmd, stats.task);
  stats_cmd->add_option("inputs", stats.inputs, "Dataset files")->required();
  stats_cmd->add_option("--format", stats.format, "auto, canonical, qasrl-v2 or qa-rows")
      ->capture_default_str();
  stats_cmd->add_option("--split", stats.split, "Split label for the report");
  AddOutputFormat(stats_cmd, stats.output_format);

  ParseOptions parse;
  CLI::App *parse_cmd = app.add_subcommand("parse", "Parse sentences into QAs");
  CLI::Option *conll =
      parse_cmd->add_option("--conll", parse.conll, "Pre-tagged CoNLL input");
  CLI::Option *tokens = parse_cmd->add_option(
      "--tokens", parse.tokens, "One tokenized sentence per line (lexicon tagger)");
  conll->excludes(tokens);
  tokens->excludes(conll);
  parse_cmd->add_option("--task", parse.tasks, "qasrl, qanom, discourse or all")
      ->check(CLI::IsMember({"qasrl", "qanom", "discourse", "all"}))
      ->capture_default_str();
  parse_cmd->add_option("--config", parse.config, "key = value settings file");
  parse_cmd->add_option("--endpoint", parse.endpoint, "Backend URL");
  parse_cmd->add_option("--gold-replay", parse.gold_replay,
                        "Answer with gold annotations from these files");
  parse_cmd->add_flag("--echo", parse.echo, "Echo backend (protocol testing)");
  parse_cmd->add_option("--scorer", parse.scorer,
                        "Predicative scorer: auto, remote, always or gold")
      ->check(CLI::IsMember({"auto", "remote", "always", "gold"}))
      ->capture_default_str();
  parse_cmd->add_option("--threshold", parse.threshold, "Predicative threshold");
  parse_cmd->add_option("--resources", parse.resources, "Resource directory override");
  parse_cmd->add_option("--output,-o", parse.output, "Output file (default stdout)");
  parse_cmd->add_option("--output-format", parse.output_format, "json, text or tsv")
      ->check(CLI::IsMember({"text", "json", "tsv"}))
      ->capture_default_str();

  EvaluateOptions evaluate;
  CLI::App *evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against gold");
  AddTask(evaluate_cmd, evaluate.task);
  evaluate_cmd->add_option("--pred", evaluate.pred, "Predictions")->required();
  evaluate_cmd->add_option("--gold", evaluate.gold, "Gold annotations")->required();
  evaluate_cmd->add_option("--format", evaluate.format, "auto, canonical, qasrl-v2 or qa-rows")
      ->capture_default_str();
  evaluate_cmd->add_option("--gamma", evaluate.gamma, "IOU threshold override");
  evaluate_cmd->add_option("--resources", evaluate.resources,
                           "Resource directory override");
  AddOutputFormat(evaluate_cmd, evaluate.output_format);

  ValidateOptions validate;
  CLI::App *validate_cmd =
      app.add_subcommand("validate", "Format conformance of model outputs");
  AddTask(validate_cmd, validate.task);
  validate_cmd->add_option("--pred", validate.pred, "Predictions (JSONL)")->required();
  validate_cmd->add_option("--resources", validate.resources,
                           "Resource directory override");
  AddOutputFormat(validate_cmd, validate.output_format);

  PositionOptions positions;
  CLI::App *positions_cmd = app.add_subcommand(
      "analyze-positions", "Precision by position in the generated sequence");
  AddTask(positions_cmd, positions.task);
  positions_cmd->add_option("--pred", positions.pred, "Predictions in generated order")
      ->required();
  positions_cmd->add_option("--gold", positions.gold, "Gold annotations")->required();
  positions_cmd->add_option("--format", positions.format,
                            "auto, canonical, qasrl-v2 or qa-rows")
      ->capture_default_str();
  positions_cmd->add_option("--resources", positions.resources,
                            "Resource directory override");
  positions.output_format = "tsv";
  AddOutputFormat(positions_cmd, positions.output_format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp &e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    PrintUsageError(app, e, err);
    return kExitUsage;
  }

  try {
    if (*prepare_cmd) return RunPrepare(prepare, out, err);
    if (*stats_cmd) return RunStats(stats, out, err);
    if (*parse_cmd) {
      if (parse.conll.empty() && parse.tokens.empty()) {
        err << "error: one of --conll or --tokens is required\n\n" << parse_cmd->help();
        return kExitUsage;
      }
      return RunParse(parse, out, err);
    }
    if (*evaluate_cmd) return RunEvaluate(evaluate, out, err);
    if (*validate_cmd) return RunValidate(validate, out, err);
    if (*positions_cmd) return RunAnalyzePositions(positions, out, err);
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace qasem::cli
