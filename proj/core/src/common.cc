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

#include "qasem/common.h"

#include <algorithm>
#include <cctype>

namespace qasem {

const char *ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kUnparseable: return "UNPARSEABLE";
    case ErrorCode::kNoPrefix: return "NO_PREFIX";
    case ErrorCode::kMarkerCollision: return "MARKER_COLLISION";
    case ErrorCode::kDelimiterCollision: return "DELIMITER_COLLISION";
    case ErrorCode::kUnalignedAnswer: return "UNALIGNED_ANSWER";
    case ErrorCode::kSizeLimit: return "SIZE_LIMIT";
    case ErrorCode::kSchema: return "SCHEMA";
    case ErrorCode::kIo: return "IO";
    case ErrorCode::kInsufficientRecords: return "INSUFFICIENT_RECORDS";
    case ErrorCode::kBackendUnavailable: return "BACKEND_UNAVAILABLE";
  }
  return "UNKNOWN";
}

const char *TaskName(Task task) {
  switch (task) {
    case Task::kQasrl: return "qasrl";
    case Task::kQanom: return "qanom";
    case Task::kDiscourse: return "discourse";
  }
  return "unknown";
}

Task ParseTask(std::string_view name) {
  std::string lower = ToLower(name);
  if (lower == "qasrl" || lower == "qa-srl") return Task::kQasrl;
  if (lower == "qanom") return Task::kQanom;
  if (lower == "discourse" || lower == "qadiscourse") return Task::kDiscourse;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown task '" + std::string(name) + "'");
}

static bool IsSpace(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::string NormalizeWhitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> parts;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    size_t start = i;
    while (i < text.size() && !IsSpace(text[i])) ++i;
    if (i > start) parts.emplace_back(text.substr(start, i - start));
  }
  return parts;
}

std::string Join(const std::vector<std::string> &parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::string ToLower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string Trim(std::string_view text) {
  size_t begin = 0;
  size_t end = text.size();
  while (begin < end && IsSpace(text[begin])) ++begin;
  while (end > begin && IsSpace(text[end - 1])) --end;
  return std::string(text.substr(begin, end - begin));
}

bool StartsWith(std::string_view text, std::string_view prefix) {
  return text.substr(0, prefix.size()) == prefix;
}

bool EndsWith(std::string_view text, std::string_view suffix) {
  return text.size() >= suffix.size() &&
         text.substr(text.size() - suffix.size()) == suffix;
}

std::vector<std::string> SplitString(std::string_view text,
                                     std::string_view delimiter) {
  std::vector<std::string> parts;
  if (delimiter.empty()) {
    parts.emplace_back(text);
    return parts;
  }
  size_t start = 0;
  while (true) {
    size_t pos = text.find(delimiter, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(text.substr(start));
      break;
    }
    parts.emplace_back(text.substr(start, pos - start));
    start = pos + delimiter.size();
  }
  return parts;
}

Random::Random(uint64_t seed) : state_(seed) {}

// SplitMix64.
uint64_t Random::Next() {
  uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t Random::Uniform(uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "Uniform(0)");
  uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t value;
  do {
    value = Next();
  } while (value >= limit);
  return value % n;
}

}  // namespace qasem
