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

#include "datasel/score_vector.h"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "datasel/error.h"

namespace datasel {
namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  out << bytes;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kParseError, where + ": '" + std::string(s) + "'");
  }
  if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteValue, where);
  return v;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_scores_csv(const ScoreVector& scores, const std::filesystem::path& path) {
  std::string out;
  out += "# metric=" + scores.metric + "\n";
  out += std::string("# higher_is_better=") + (scores.higher_is_better ? "1" : "0") + "\n";
  for (const auto& [key, value] : scores.params) {
    out += "# " + key + "=" + value + "\n";
  }
  out += "index,score\n";
  for (std::size_t i = 0; i < scores.values.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_number(scores.values[i]);
    out += '\n';
  }
  write_bytes(path, out);
}

ScoreVector read_scores_csv(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  ScoreVector scores;
  scores.metric = "unknown";
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + " line " + std::to_string(lineno);
    if (line.front() == '#') {
      std::string_view body(line);
      body.remove_prefix(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      std::string key(body.substr(0, eq));
      std::string value(body.substr(eq + 1));
      if (key == "metric") {
        scores.metric = value;
      } else if (key == "higher_is_better") {
        scores.higher_is_better = value != "0";
      } else {
        scores.params[key] = value;
      }
      continue;
    }
    if (!saw_header) {
      if (line != "index,score") {
        throw Error(ErrorCode::kParseError, where + ": expected header index,score");
      }
      saw_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::kParseError, where + ": missing comma");
    }
    std::size_t index = 0;
    const std::string_view idx(line.data(), comma);
    auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), index);
    if (ec != std::errc() || ptr != idx.data() + idx.size() ||
        index != scores.values.size()) {
      throw Error(ErrorCode::kParseError,
                  where + ": expected index " + std::to_string(scores.values.size()));
    }
    scores.values.push_back(
        parse_double(std::string_view(line).substr(comma + 1), where));
  }
  if (!saw_header) {
    throw Error(ErrorCode::kParseError, path.string() + ": missing header index,score");
  }
  return scores;
}

void write_scores_scr1(const ScoreVector& scores, const std::filesystem::path& path) {
  std::string out = "SCR1";
  auto put = [&out](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>(v >> (8 * b)));
  };
  put(scores.values.size());
  for (double v : scores.values) put(std::bit_cast<std::uint64_t>(v));
  write_bytes(path, out);
}

ScoreVector read_scores_scr1(const std::filesystem::path& path) {
  const std::string bytes = read_text(path);
  if (bytes.size() < 4 || bytes.compare(0, 4, "SCR1") != 0) {
    throw Error(ErrorCode::kBadMagic, path.string() + ": offset 0: expected \"SCR1\"");
  }
  if (bytes.size() < 12) {
    throw Error(ErrorCode::kTruncatedFile, path.string() + ": header needs 12 bytes");
  }
  auto get = [&bytes](std::size_t offset) {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + b]))
           << (8 * b);
    }
    return v;
  };
  const std::uint64_t n = get(4);
  const std::uint64_t payload = bytes.size() - 12;
  if (n > payload / 8) {
    throw Error(ErrorCode::kTruncatedFile,
                path.string() + ": expected " + std::to_string(n) + " values");
  }
  if (payload != n * 8) {
    throw Error(ErrorCode::kTrailingBytes,
                path.string() + ": offset " + std::to_string(12 + n * 8));
  }
  ScoreVector scores;
  scores.metric = "unknown";
  scores.values.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double v = std::bit_cast<double>(get(12 + 8 * i));
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFiniteValue,
                  path.string() + ": offset " + std::to_string(12 + 8 * i));
    }
    scores.values[i] = v;
  }
  return scores;
}

void write_scores(const ScoreVector& scores, const std::filesystem::path& path) {
  if (path.extension() == ".scr1") {
    write_scores_scr1(scores, path);
  } else {
    write_scores_csv(scores, path);
  }
}

ScoreVector read_scores(const std::filesystem::path& path) {
  return path.extension() == ".scr1" ? read_scores_scr1(path) : read_scores_csv(path);
}

}  // namespace datasel
