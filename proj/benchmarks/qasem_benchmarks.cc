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

#include <benchmark/benchmark.h>

#include "qa_generator.h"
#include "qasem/metrics.h"
#include "qasem/question_grammar.h"
#include "qasem/seq_codec.h"

namespace qasem {
namespace {

std::vector<std::vector<double>> RandomMatrix(size_t n, uint64_t seed) {
  Random rng(seed);
  std::vector<std::vector<double>> iou(n, std::vector<double>(n));
  for (auto &row : iou) {
    for (auto &v : row) v = static_cast<double>(rng.Uniform(11)) / 10.0;
  }
  return iou;
}

void BM_AlignHungarian(benchmark::State &state) {
  auto iou = RandomMatrix(static_cast<size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(AlignFromMatrix(iou, 0.3));
}
BENCHMARK(BM_AlignHungarian)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_AlignExhaustive(benchmark::State &state) {
  auto iou = RandomMatrix(static_cast<size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(AlignFromMatrixExhaustive(iou, 0.3));
}
BENCHMARK(BM_AlignExhaustive)->Arg(4)->Arg(6)->Arg(8);

void BM_Delinearize(benchmark::State &state) {
  testing::QaGenerator gen(2);
  auto tokens = gen.Sentence(30, 40);
  std::vector<QAPair> qas;
  while (qas.size() < 6) qas = gen.QaSet(Task::kQasrl, tokens, 8);
  std::string sequence = LinearizeOutput(qas, Task::kQasrl);
  DelinearizeOptions options;
  options.grammar = &QuestionGrammar::Default();
  options.verb_form = "shoot";
  for (auto _ : state) {
    benchmark::DoNotOptimize(DelinearizeOutput(sequence, tokens, Task::kQasrl, options));
  }
}
BENCHMARK(BM_Delinearize);

void BM_GrammarParse(benchmark::State &state) {
  const QuestionGrammar &grammar = QuestionGrammar::Default();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        grammar.TryParse("How long was someone recovering from something?", "recover"));
  }
}
BENCHMARK(BM_GrammarParse);

void BM_PermutationsAll(benchmark::State &state) {
  PermutationScheme scheme{PermutationScheme::Kind::kAll, 10};
  for (auto _ : state) {
    benchmark::DoNotOptimize(PermutationIndices(static_cast<size_t>(state.range(0)), scheme));
  }
}
BENCHMARK(BM_PermutationsAll)->Arg(3)->Arg(6)->Arg(12);

void BM_PermutationsFixed(benchmark::State &state) {
  PermutationScheme scheme{PermutationScheme::Kind::kFixed, 10, 3, 5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(PermutationIndices(static_cast<size_t>(state.range(0)), scheme));
  }
}
BENCHMARK(BM_PermutationsFixed)->Arg(3)->Arg(12);

}  // namespace
}  // namespace qasem

BENCHMARK_MAIN();
