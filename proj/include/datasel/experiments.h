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

// Named experiments over the synthetic linear model. Each produces per-subset
// result rows plus pass/fail checks on the trend it exercises.

#ifndef DATASEL_EXPERIMENTS_H_
#define DATASEL_EXPERIMENTS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "datasel/score_vector.h"

namespace datasel {

// Zero selects the experiment's own default.
struct ExperimentOptions {
  std::size_t d = 0;
  std::size_t r = 0;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

struct ResultRow {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t r = 0;
  std::size_t subset_id = 0;
  std::optional<double> trace_term;
  std::optional<double> test_loss_gap;
  std::optional<double> test_loss_self;
  std::optional<double> eps_v;
  std::optional<double> eps_l;
  std::optional<double> eps_vl;
};

struct Check {
  std::string name;
  double value = 0.0;
  std::string bound;  // e.g. "<= -0.9"
  bool passed = false;
};

struct ExperimentResult {
  std::string experiment;
  ParamRecord manifest;
  std::vector<ResultRow> rows;
  std::vector<Check> checks;
  // Diagnostics that do not gate the result.
  std::vector<std::pair<std::string, double>> observations;

  bool passed() const;
};

const std::vector<std::string>& experiment_names();

// InvalidParameter for an unknown name or inconsistent options.
ExperimentResult run_experiment(std::string_view name, const ExperimentOptions& options);

// "# key=value" manifest, check and observation lines, then the CSV table.
void write_experiment_csv(const ExperimentResult& result,
                          const std::filesystem::path& path);

}  // namespace datasel

#endif  // DATASEL_EXPERIMENTS_H_
