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

#ifndef DATASEL_SELECTION_H_
#define DATASEL_SELECTION_H_

#include <cstddef>
#include <filesystem>
#include <vector>

#include "datasel/score_vector.h"

namespace datasel {

// Retained pool positions: strictly increasing, all < pool_n.
class Selection {
 public:
  Selection() = default;
  // Throws IndexOutOfRange for entries >= pool_n and InvalidParameter when
  // the indices are not strictly increasing.
  Selection(std::size_t pool_n, std::vector<std::size_t> indices);

  // Sorts and removes duplicates first.
  static Selection from_unsorted(std::size_t pool_n,
                                 std::vector<std::size_t> indices);
  static Selection all(std::size_t pool_n);

  std::size_t pool_n() const { return pool_n_; }
  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(std::size_t i) const;

  friend bool operator==(const Selection&, const Selection&) = default;

 private:
  std::size_t pool_n_ = 0;
  std::vector<std::size_t> indices_;
};

// Ordered training manifest; duplicates are intentional (oversampling).
struct TrainingList {
  std::size_t pool_n = 0;
  std::vector<std::size_t> entries;

  std::size_t unique_count() const;
};

// Selection file: "# pool_n=<n>" and "# key=value" lines, then one index per
// line, ascending, newline-terminated. Readers skip '#' lines; a file without
// pool_n gets pool_n = max index + 1.
void write_selection(const Selection& sel, const std::filesystem::path& path,
                     const ParamRecord& params = {});
Selection read_selection(const std::filesystem::path& path);

// Training list file: "# unique=<k>" first, then "# pool_n=<n>" and params,
// then entries in list order.
void write_training_list(const TrainingList& list,
                         const std::filesystem::path& path,
                         const ParamRecord& params = {});
TrainingList read_training_list(const std::filesystem::path& path);

}  // namespace datasel

#endif  // DATASEL_SELECTION_H_
