/*
 * Copyright 2026 The privdistill Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PRIVDISTILL_TABULAR_IO_H_
#define PRIVDISTILL_TABULAR_IO_H_

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace privdistill {

struct CsvRow {
  size_t line_number = 0;  // 1-based line where the row starts
  std::vector<std::string> fields;
};

// RFC 4180 CSV: quoted fields may contain commas, doubled quotes and newlines.
// A trailing CR before LF is stripped. Throws Error(kFormatError) on an
// unterminated quote.
std::vector<CsvRow> ParseCsv(std::string_view content);

// Key of the header line written ahead of JSONL artifacts by the CLI.
inline constexpr std::string_view kProvenanceKey = "_provenance";

// Calls `visit(line_number, object)` for each non-blank JSONL line, skipping
// provenance header lines. Throws Error(kFormatError) naming the line on
// malformed JSON.
void ForEachJsonLine(
    std::string_view content,
    const std::function<void(size_t, const nlohmann::json&)>& visit);

// Parses a document that is either a JSON array or JSONL of objects.
std::vector<nlohmann::json> ParseJsonArrayOrLines(std::string_view content);

}  // namespace privdistill

#endif  // PRIVDISTILL_TABULAR_IO_H_
