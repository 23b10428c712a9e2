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

#ifndef QASEM_RESOURCES_H_
#define QASEM_RESOURCES_H_

#include <string>
#include <vector>

namespace qasem {

// Raw contents of the lexical resource files. The bundled copies are compiled
// into the library; a directory with any subset of the files overrides them.
struct ResourceBundle {
  std::string inflections;         // inflections.tsv
  std::string prepositions;        // prepositions.txt
  std::string discourse_prefixes;  // discourse_prefixes.tsv
  std::string nominalizations;     // nominalizations.tsv
};

const ResourceBundle &BundledResources();

// Missing files fall back to the bundled copy. Throws Error(kIo) when the
// directory itself cannot be read.
ResourceBundle LoadResourceDirectory(const std::string &directory);

// Splits a resource file into non-comment, non-blank lines, each split on
// tabs. Throws Error(kSchema) when a line has a column count other than
// `columns` (0 disables the check).
std::vector<std::vector<std::string>> ParseTsvResource(
    const std::string &content, size_t columns, const std::string &name);

}  // namespace qasem

#endif  // QASEM_RESOURCES_H_
