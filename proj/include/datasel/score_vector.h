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

#ifndef DATASEL_SCORE_VECTOR_H_
#define DATASEL_SCORE_VECTOR_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace datasel {

// Ordered key=value record of every knob that influenced an output.
using ParamRecord = std::map<std::string, std::string>;

// Shortest decimal form that parses back to the same binary64 value.
std::string format_number(double value);

struct ScoreVector {
  std::vector<double> values;
  std::string metric;
  ParamRecord params;
  bool higher_is_better = true;

  std::size_t size() const { return values.size(); }
};

// CSV score file:
//
//   # metric=<name>
//   # higher_is_better=<0|1>
//   # <param>=<value>        (one line per parameter, sorted by key)
//   index,score
//   0,<score>
//   ...
void write_scores_csv(const ScoreVector& scores, const std::filesystem::path& path);
ScoreVector read_scores_csv(const std::filesystem::path& path);

// SCR1 binary mirror: "SCR1", u64 n, n binary64 values (little-endian).
// Carries values only; metadata comes back as metric "unknown", higher is
// better.
void write_scores_scr1(const ScoreVector& scores, const std::filesystem::path& path);
ScoreVector read_scores_scr1(const std::filesystem::path& path);

// Dispatches on the ".scr1" extension; anything else is CSV.
void write_scores(const ScoreVector& scores, const std::filesystem::path& path);
ScoreVector read_scores(const std::filesystem::path& path);

}  // namespace datasel

#endif  // DATASEL_SCORE_VECTOR_H_
