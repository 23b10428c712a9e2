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

#ifndef QASEM_TOOLS_CLI_H_
#define QASEM_TOOLS_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qasem/common.h"
#include "qasem/seq_codec.h"

namespace qasem::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDiagnostics = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the qasem tool. Subcommands: prepare, stats, parse,
// evaluate, validate, analyze-positions.
int Run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

// Exactly one bucket per predicted item.
enum class Validity { kValid, kMalformedSequence, kUnalignableAnswer, kUnparseableQuestion };

struct ValidityCounts {
  int64_t valid = 0;
  int64_t malformed_sequence = 0;
  int64_t unalignable_answer = 0;
  int64_t unparseable_question = 0;

  int64_t total() const {
    return valid + malformed_sequence + unalignable_answer + unparseable_question;
  }
  ValidityCounts &operator+=(const ValidityCounts &other);
};

// Partitions one delinearized output: each recovered QA is valid or takes
// the most severe of its diagnostics (malformed, then unparseable, then
// unalignable); each detached malformed fragment counts as one item.
ValidityCounts PartitionOutput(const DelinearizeResult &result);

}  // namespace qasem::cli

#endif  // QASEM_TOOLS_CLI_H_
