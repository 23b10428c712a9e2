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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "test_support.h"

namespace qasem::cli {
namespace {

using testing::TestdataPath;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result RunCli(std::vector<std::string> args) {
  args.insert(args.begin(), "qasem");
  std::vector<const char *> argv;
  for (const auto &arg : args) argv.push_back(arg.c_str());
  std::ostringstream out, err;
  int code = Run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("qasem_cli_test_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string Write(const std::string &name, const std::string &content) {
    std::string path = (dir_ / name).string();
    std::ofstream(path) << content;
    return path;
  }

  std::filesystem::path dir_;
};

TEST_F(CliTest, NoSubcommandIsUsageError) {
  Result r = RunCli({});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("prepare"), std::string::npos);
  EXPECT_EQ(RunCli({"frobnicate"}).code, kExitUsage);
}

TEST_F(CliTest, EvaluateGoldAgainstGold) {
  struct Case {
    const char *task;
    const char *file;
    std::vector<std::string> keys;
  };
  for (const Case &c : {Case{"qasrl", "dev_qasrl.jsonl", {"ua_f1", "la_f1"}},
                        Case{"qanom", "dev_qanom.jsonl", {"ua_p", "la_r"}},
                        Case{"discourse", "dev_discourse.jsonl",
                             {"uqa_f1", "lqa_accuracy", "prefix_accuracy"}}}) {
    Result r = RunCli({"evaluate", "--task", c.task, "--pred", TestdataPath(c.file), "--gold",
                       TestdataPath(c.file), "--output-format", "json"});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    auto j = nlohmann::json::parse(r.out);
    for (const auto &key : c.keys) EXPECT_DOUBLE_EQ(j[key].get<double>(), 100.0) << key;
  }
}

TEST_F(CliTest, EvaluateCountsMissingAndExtraPredictions) {
  std::string gold = TestdataPath("table1.jsonl");
  auto records = testing::RecordsOf(testing::LoadTable1(), Task::kQasrl);
  std::ostringstream pred;
  WriteDataset(pred, {records[0]});
  Result r = RunCli({"evaluate", "--task", "qasrl", "--pred", Write("pred.jsonl", pred.str()),
                     "--gold", gold, "--output-format", "tsv"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("ua_p\t100.0\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("ua_fn\t4\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, PrepareIsDeterministic) {
  std::vector<std::string> args = {"prepare", "--task", "qasrl", "--input",
                                   TestdataPath("dev_qasrl.jsonl"), "--permute", "fixed",
                                   "--count", "3", "--seed", "17"};
  Result a = RunCli(args);
  Result b = RunCli(args);
  EXPECT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 21 * 3);
}

TEST_F(CliTest, PrepareOrderAndPermuteExclusive) {
  Result r = RunCli({"prepare", "--task", "qasrl", "--input", TestdataPath("table1.jsonl"),
                     "--order", "role", "--permute", "all"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("--permute"), std::string::npos);
}

TEST_F(CliTest, PrepareJointCorpusJsonl) {
  Result r = RunCli({"prepare", "--task", "qasrl", "--input", TestdataPath("dev_qasrl.jsonl"),
                     "--joint-nominal", TestdataPath("dev_qanom.jsonl"), "--duplication", "2",
                     "--task-signal", "prefix", "--pairs-format", "jsonl"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("verbal questions 54, nominal questions 16"), std::string::npos) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  int nominal = 0, total = 0;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line);
    ++total;
    if (StartsWith(j["source"].get<std::string>(), "parse nominal: ")) ++nominal;
  }
  EXPECT_EQ(total, 21 + 2 * 5);
  EXPECT_EQ(nominal, 10);
}

TEST_F(CliTest, StatsCounts) {
  Result r = RunCli({"stats", "--task", "qanom", TestdataPath("dev_qanom.jsonl"), "--split",
                     "dev"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out,
            "task qanom\nsplit dev\nsentences 6\npredicates 5\nquestions 8\nanswers 8\n"
            "skipped_records 0\n");
  Result tsv = RunCli({"stats", "--task", "qasrl", TestdataPath("dev_qasrl.jsonl"),
                       TestdataPath("table1.jsonl"), "--output-format", "tsv"});
  EXPECT_NE(tsv.out.find("questions\t61\n"), std::string::npos) << tsv.out;
}

TEST_F(CliTest, StatsMissingFile) {
  Result r = RunCli({"stats", "--task", "qasrl", (dir_ / "absent.jsonl").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("error: IO:"), std::string::npos) << r.err;
}

TEST_F(CliTest, ParseWithGoldReplay) {
  std::string tokens = Write("tokens.txt", Join(testing::Table1Tokens(), " ") + "\n");
  Result r = RunCli({"parse", "--tokens", tokens, "--gold-replay", TestdataPath("table1.jsonl"),
                     "--scorer", "gold"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("sentences 1, qas 11, diagnostics 0"), std::string::npos) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["results"].size(), 4u);
}

TEST_F(CliTest, ParseEchoReportsDiagnostics) {
  std::string conll = Write("in.conll", "Kim\tNNP\nran\tVBD\n.\t.\n");
  Result r = RunCli({"parse", "--conll", conll, "--echo", "--task", "qasrl",
                     "--output-format", "text"});
  EXPECT_EQ(r.code, kExitDiagnostics) << r.err;
  EXPECT_NE(r.out.find("MALFORMED_SEQUENCE"), std::string::npos) << r.out;
}

TEST_F(CliTest, ParseNeedsBackendAndInput) {
  std::string tokens = Write("tokens.txt", "Kim ran .\n");
  EXPECT_EQ(RunCli({"parse", "--tokens", tokens}).code, kExitUsage);
  EXPECT_EQ(RunCli({"parse", "--echo"}).code, kExitUsage);
}

TEST_F(CliTest, ValidatePartitionsOutputs) {
  std::string tokens = R"(["Both", "were", "shot", "in", "the", "confrontation"])";
  auto row = [&](const std::string &output) {
    return R"({"sentence_id": "v", "tokens": )" + tokens +
           R"(, "predicate_index": 2, "verb_form": "shoot", "output": )" +
           nlohmann::json(output).dump() + "}\n";
  };
  std::string path = Write("pred.jsonl", row("Who was shot? </q> Both </qa> Banana yellow? </q> the") +
                                             row("Who was shot? </q> Bot") + row("garbage"));
  Result r = RunCli({"validate", "--task", "qasrl", "--pred", path, "--output-format", "json"});
  EXPECT_EQ(r.code, kExitDiagnostics);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["total"], 4);
  EXPECT_EQ(j["valid"], 1);
  EXPECT_EQ(j["unparseable_question"], 1);
  EXPECT_EQ(j["unalignable_answer"], 1);
  EXPECT_EQ(j["malformed_sequence"], 1);

  Result clean = RunCli({"validate", "--task", "qasrl", "--pred", TestdataPath("dev_qasrl.jsonl")});
  EXPECT_EQ(clean.code, kExitOk) << clean.err;
  EXPECT_NE(clean.out.find("valid 54\n"), std::string::npos) << clean.out;
}

TEST_F(CliTest, PartitionSeverity) {
  DelinearizeResult result;
  result.qas.resize(3);
  result.diagnostics = {{DiagnosticKind::kUnalignableAnswer, "", "", 0},
                        {DiagnosticKind::kUnparseableQuestion, "", "", 0},
                        {DiagnosticKind::kUnalignableAnswer, "", "", 1},
                        {DiagnosticKind::kMalformedSequence, "", "", -1}};
  ValidityCounts counts = PartitionOutput(result);
  EXPECT_EQ(counts.valid, 1);
  EXPECT_EQ(counts.unparseable_question, 1);
  EXPECT_EQ(counts.unalignable_answer, 1);
  EXPECT_EQ(counts.malformed_sequence, 1);
  EXPECT_EQ(counts.total(), 4);
}

TEST_F(CliTest, AnalyzePositions) {
  Result r = RunCli({"analyze-positions", "--task", "qasrl", "--pred",
                     TestdataPath("dev_qasrl.jsonl"), "--gold", TestdataPath("dev_qasrl.jsonl")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(StartsWith(r.out, "position\tprecision\taligned\tsupport\n0\t1.0000\t")) << r.out;
}

}  // namespace
}  // namespace qasem::cli
