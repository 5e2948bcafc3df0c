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

#include "datasel/selection.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include "datasel/error.h"

namespace datasel {
namespace {

struct IndexFile {
  std::optional<std::size_t> pool_n;
  std::vector<std::size_t> entries;
};

IndexFile parse_index_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  IndexFile file;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string key = "# pool_n=";
      if (line.rfind(key, 0) == 0) {
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(line.data() + key.size(),
                                         line.data() + line.size(), v);
        if (ec != std::errc() || ptr != line.data() + line.size()) {
          throw Error(ErrorCode::kParseError,
                      path.string() + " line " + std::to_string(lineno));
        }
        file.pool_n = v;
      }
      continue;
    }
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size()) {
      throw Error(ErrorCode::kParseError, path.string() + " line " +
                                              std::to_string(lineno) + ": '" +
                                              line + "'");
    }
    file.entries.push_back(v);
  }
  return file;
}

std::size_t implied_pool(const IndexFile& f) {
  if (f.pool_n) return *f.pool_n;
  return f.entries.empty() ? 0 : *std::max_element(f.entries.begin(), f.entries.end()) + 1;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

void append_params(std::string& out, const ParamRecord& params) {
  for (const auto& [key, value] : params) {
    if (key == "pool_n" || key == "unique") continue;
    out += "# " + key + "=" + value + "\n";
  }
}

}  // namespace

Selection::Selection(std::size_t pool_n, std::vector<std::size_t> indices)
    : pool_n_(pool_n), indices_(std::move(indices)) {
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (indices_[k] >= pool_n_) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "index " + std::to_string(indices_[k]) + " >= pool_n=" +
                      std::to_string(pool_n_));
    }
    if (k > 0 && indices_[k] <= indices_[k - 1]) {
      throw Error(ErrorCode::kInvalidParameter,
                  "selection indices must be strictly increasing");
    }
  }
}

Selection Selection::from_unsorted(std::size_t pool_n,
                                   std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return Selection(pool_n, std::move(indices));
}

Selection Selection::all(std::size_t pool_n) {
  std::vector<std::size_t> idx(pool_n);
  for (std::size_t i = 0; i < pool_n; ++i) idx[i] = i;
  return Selection(pool_n, std::move(idx));
}

bool Selection::contains(std::size_t i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

std::size_t TrainingList::unique_count() const {
  std::vector<std::size_t> sorted = entries;
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(
      std::distance(sorted.begin(), std::unique(sorted.begin(), sorted.end())));
}

void write_selection(const Selection& sel, const std::filesystem::path& path,
                     const ParamRecord& params) {
  std::string out = "# pool_n=" + std::to_string(sel.pool_n()) + "\n";
  append_params(out, params);
  for (std::size_t i : sel.indices()) {
    out += std::to_string(i);
    out += '\n';
  }
  write_text(path, out);
}

Selection read_selection(const std::filesystem::path& path) {
  IndexFile f = parse_index_file(path);
  const std::size_t pool_n = implied_pool(f);
  try {
    return Selection(pool_n, std::move(f.entries));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void write_training_list(const TrainingList& list,
                         const std::filesystem::path& path,
                         const ParamRecord& params) {
  std::string out = "# unique=" + std::to_string(list.unique_count()) + "\n";
  out += "# pool_n=" + std::to_string(list.pool_n) + "\n";
  append_params(out, params);
  for (std::size_t i : list.entries) {
    out += std::to_string(i);
    out += '\n';
  }
  write_text(path, out);
}

TrainingList read_training_list(const std::filesystem::path& path) {
  IndexFile f = parse_index_file(path);
  TrainingList list;
  list.pool_n = implied_pool(f);
  for (std::size_t i : f.entries) {
    if (i >= list.pool_n) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  path.string() + ": index " + std::to_string(i));
    }
  }
  list.entries = std::move(f.entries);
  return list;
}

}  // namespace datasel
