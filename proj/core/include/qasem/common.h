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

#ifndef QASEM_COMMON_H_
#define QASEM_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qasem {

enum class ErrorCode {
  kInvalidArgument,
  kUnparseable,
  kNoPrefix,
  kMarkerCollision,
  kDelimiterCollision,
  kUnalignedAnswer,
  kSizeLimit,
  kSchema,
  kIo,
  kInsufficientRecords,
  kBackendUnavailable,
};

const char *ErrorCodeName(ErrorCode code);

// All toolkit failures are reported through this exception type. The code
// lets callers dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Annotation layers handled by the toolkit.
enum class Task { kQasrl, kQanom, kDiscourse };

const char *TaskName(Task task);
Task ParseTask(std::string_view name);

// True for the predicate-level tasks that share the QA-SRL question format.
inline bool IsPredicateTask(Task task) { return task != Task::kDiscourse; }

// String helpers.
std::string NormalizeWhitespace(std::string_view text);
std::vector<std::string> SplitWhitespace(std::string_view text);
std::string Join(const std::vector<std::string> &parts, std::string_view sep);
std::string ToLower(std::string_view text);
std::string Trim(std::string_view text);
bool StartsWith(std::string_view text, std::string_view prefix);
bool EndsWith(std::string_view text, std::string_view suffix);

// Splits on every occurrence of `delimiter`; keeps empty pieces.
std::vector<std::string> SplitString(std::string_view text,
                                     std::string_view delimiter);

// Seed-deterministic RNG helpers. The standard distributions are
// implementation-defined, so sampling uses rejection on raw engine output to
// keep results identical across standard libraries.
class Random {
 public:
  explicit Random(uint64_t seed);

  uint64_t Next();

  // Uniform integer in [0, n). n must be positive.
  uint64_t Uniform(uint64_t n);

  template <typename T>
  void Shuffle(std::vector<T> &items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(Uniform(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  uint64_t state_;
};

}  // namespace qasem

#endif  // QASEM_COMMON_H_
