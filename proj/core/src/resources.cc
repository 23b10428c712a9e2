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

#include "qasem/resources.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qasem/common.h"

namespace qasem {
namespace embedded {
extern const char *const kInflections;
extern const char *const kPrepositions;
extern const char *const kDiscoursePrefixes;
extern const char *const kNominalizations;
}  // namespace embedded

const ResourceBundle &BundledResources() {
  static const ResourceBundle bundle{
      embedded::kInflections, embedded::kPrepositions,
      embedded::kDiscoursePrefixes, embedded::kNominalizations};
  return bundle;
}

static void ReadIfPresent(const std::filesystem::path &path,
                          std::string *content) {
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  *content = ss.str();
}

ResourceBundle LoadResourceDirectory(const std::string &directory) {
  std::filesystem::path dir(directory);
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "resource directory not found: " + directory);
  }
  ResourceBundle bundle = BundledResources();
  ReadIfPresent(dir / "inflections.tsv", &bundle.inflections);
  ReadIfPresent(dir / "prepositions.txt", &bundle.prepositions);
  ReadIfPresent(dir / "discourse_prefixes.tsv", &bundle.discourse_prefixes);
  ReadIfPresent(dir / "nominalizations.tsv", &bundle.nominalizations);
  return bundle;
}

std::vector<std::vector<std::string>> ParseTsvResource(
    const std::string &content, size_t columns, const std::string &name) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(content);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || StartsWith(Trim(line), "#")) continue;
    std::vector<std::string> fields = SplitString(line, "\t");
    for (auto &field : fields) field = Trim(field);
    if (columns != 0 && fields.size() != columns) {
      throw Error(ErrorCode::kSchema,
                  name + ":" + std::to_string(line_number) + ": expected " +
                      std::to_string(columns) + " columns, got " +
                      std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace qasem
