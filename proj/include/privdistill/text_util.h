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

#ifndef PRIVDISTILL_TEXT_UTIL_H_
#define PRIVDISTILL_TEXT_UTIL_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace privdistill {

// 64-bit FNV-1a. Stable across platforms; used for record ids, cache keys and
// exclusion lists.
uint64_t Fnv1a64(std::string_view data, uint64_t basis = 0xcbf29ce484222325ULL);

// Zero-padded 16-digit lowercase hex.
std::string HexU64(uint64_t value);

bool IsAsciiSpace(char c);

// Strips leading/trailing ASCII whitespace.
std::string_view Trim(std::string_view text);

// ASCII lowercase; bytes >= 0x80 pass through unchanged.
std::string AsciiLower(std::string_view text);

// Lowercased, whitespace runs collapsed to a single space, trimmed.
std::string NormalizeText(std::string_view text);

// Hex hash of NormalizeText(text). This is the exclusion-list key.
std::string NormalizedTextHash(std::string_view text);

// Half-open byte ranges of maximal non-whitespace runs.
std::vector<std::pair<size_t, size_t>> WordSpans(std::string_view text);

// Whitespace tokens.
std::vector<std::string_view> SplitWhitespace(std::string_view text);

// Throws Error(kFileUnreadable).
std::string ReadFile(const std::string& path);

// Writes atomically enough for our purposes: truncate + write + flush.
// Throws Error(kFileUnreadable) when the path cannot be opened.
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace privdistill

#endif  // PRIVDISTILL_TEXT_UTIL_H_
