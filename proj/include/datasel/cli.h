/* Copyright 2026 The datasel Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end. Subcommands: score, select, combine, dynamic,
// simulate. Exit codes: 0 ok, 2 usage, 3 data, 4 failed experiment check.

#ifndef DATASEL_CLI_H_
#define DATASEL_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace datasel {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitAssertion = 4;

// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace datasel

#endif  // DATASEL_CLI_H_
