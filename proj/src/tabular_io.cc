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

#include "privdistill/tabular_io.h"

#include "privdistill/error.h"
#include "privdistill/text_util.h"

namespace privdistill {

std::vector<CsvRow> ParseCsv(std::string_view content) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool in_quotes = false;
  bool row_has_data = false;
  size_t line = 1;
  row.line_number = 1;

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    if (row_has_data) rows.push_back(std::move(row));
    row = CsvRow{};
    row_has_data = false;
  };

  for (size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_data = true;
        break;
      case ',':
        end_field();
        row_has_data = true;
        break;
      case '\r':
        if (i + 1 < content.size() && content[i + 1] == '\n') break;
        field.push_back(c);
        row_has_data = true;
        break;
      case '\n':
        end_row();
        ++line;
        row.line_number = line;
        break;
      default:
        field.push_back(c);
        row_has_data = true;
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::kFormatError,
                "unterminated quoted field starting in row at line " +
                    std::to_string(row.line_number));
  }
  end_row();
  return rows;
}

void ForEachJsonLine(
    std::string_view content,
    const std::function<void(size_t, const nlohmann::json&)>& visit) {
  size_t line_number = 0;
  size_t pos = 0;
  while (pos <= content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    ++line_number;
    const std::string_view line = Trim(content.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    nlohmann::json object;
    try {
      object = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kFormatError, "line " +
                                               std::to_string(line_number) +
                                               ": " + e.what());
    }
    if (!object.is_object()) {
      throw Error(ErrorCode::kFormatError,
                  "line " + std::to_string(line_number) + ": not an object");
    }
    if (object.contains(kProvenanceKey)) continue;
    visit(line_number, object);
  }
}

std::vector<nlohmann::json> ParseJsonArrayOrLines(std::string_view content) {
  const std::string_view trimmed = Trim(content);
  std::vector<nlohmann::json> out;
  if (!trimmed.empty() && trimmed.front() == '[') {
    nlohmann::json array;
    try {
      array = nlohmann::json::parse(trimmed);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kFormatError, e.what());
    }
    for (auto& item : array) out.push_back(std::move(item));
    return out;
  }
  ForEachJsonLine(content, [&](size_t, const nlohmann::json& object) {
    out.push_back(object);
  });
  return out;
}

}  // namespace privdistill
