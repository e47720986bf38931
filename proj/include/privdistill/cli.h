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

#ifndef PRIVDISTILL_CLI_H_
#define PRIVDISTILL_CLI_H_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace privdistill::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitEndpoint = 3;

// Runs one subcommand. args[0] is the program name. Primary output goes to
// --out (or `out` when absent); diagnostics go to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace privdistill::cli

#endif  // PRIVDISTILL_CLI_H_
