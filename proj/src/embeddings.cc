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

#include "datasel/embeddings.h"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <string_view>

#include "datasel/error.h"

namespace datasel {
namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * b)));
  }
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    value |= static_cast<T>(bytes[offset + b]) << (8 * b);
  }
  return value;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

EmbeddingSet parse_csv(std::string_view text) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    std::size_t fields = 0;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string_view field = line.substr(
          start, comma == std::string_view::npos ? std::string_view::npos
                                                 : comma - start);
      while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
      while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw Error(ErrorCode::kParseError,
                    "row " + std::to_string(rows) + " field " +
                        std::to_string(fields) + ": '" + std::string(field) + "'");
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteValue,
                    "row " + std::to_string(rows) + " field " + std::to_string(fields));
      }
      values.push_back(v);
      ++fields;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = fields;
    } else if (fields != cols) {
      throw Error(ErrorCode::kParseError,
                  "row " + std::to_string(rows) + " has " + std::to_string(fields) +
                      " fields, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::kDimensionZero, "CSV contains no samples");
  }
  RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::copy(values.begin(), values.end(), m.data());
  return EmbeddingSet(std::move(m));
}

std::string format_csv(const EmbeddingSet& set) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < set.n(); ++i) {
    const auto row = set.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out.push_back(',');
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), row[j]);
      out.append(buf, ptr);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace

EmbeddingSet::EmbeddingSet(RowMatrix data, Modality modality)
    : data_(std::move(data)), modality_(modality) {
  if (data_.rows() == 0 || data_.cols() == 0) {
    throw Error(ErrorCode::kDimensionZero,
                "embedding set needs n >= 1 and d >= 1");
  }
  const double* p = data_.data();
  for (Eigen::Index k = 0; k < data_.size(); ++k) {
    if (!std::isfinite(p[k])) {
      throw Error(ErrorCode::kNonFiniteValue,
                  "row " + std::to_string(k / data_.cols()) + " column " +
                      std::to_string(k % data_.cols()));
    }
  }
}

EmbeddingSet EmbeddingSet::with_modality(Modality modality) const {
  EmbeddingSet copy = *this;
  copy.modality_ = modality;
  return copy;
}

std::vector<std::uint8_t> encode_emb1(const EmbeddingSet& set) {
  std::vector<std::uint8_t> out;
  out.reserve(kEmb1HeaderBytes + 4 * set.n() * set.d());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint32_t>(out, 1);
  put_le<std::uint64_t>(out, set.n());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.d()));
  out.push_back(static_cast<std::uint8_t>(set.modality()));
  put_le<std::uint32_t>(out, 0);

  const double* p = set.matrix().data();
  const std::size_t count = set.n() * set.d();
  for (std::size_t k = 0; k < count; ++k) {
    const float f = static_cast<float>(p[k]);
    if (!std::isfinite(f)) {
      throw Error(ErrorCode::kNonFiniteValue,
                  "value at row " + std::to_string(k / set.d()) +
                      " overflows binary32");
    }
    put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

EmbeddingSet decode_emb1(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 4 &&
      !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin(),
                  [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; })) {
    throw Error(ErrorCode::kBadMagic, "offset 0: expected \"EMB1\"");
  }
  if (bytes.size() < kEmb1HeaderBytes) {
    throw Error(ErrorCode::kTruncatedFile,
                "header needs 25 bytes, file has " + std::to_string(bytes.size()));
  }
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != 1) {
    throw Error(ErrorCode::kBadHeader,
                "offset 4: unsupported version " + std::to_string(version));
  }
  const auto n = get_le<std::uint64_t>(bytes, 8);
  const auto d = get_le<std::uint32_t>(bytes, 16);
  const std::uint8_t modality = bytes[20];
  if (modality > 2) {
    throw Error(ErrorCode::kBadHeader,
                "offset 20: unknown modality " + std::to_string(modality));
  }
  if (get_le<std::uint32_t>(bytes, 21) != 0) {
    throw Error(ErrorCode::kBadHeader, "offset 21: reserved bytes must be zero");
  }
  if (n == 0 || d == 0) {
    throw Error(ErrorCode::kDimensionZero,
                "offset 8: n=" + std::to_string(n) + " d=" + std::to_string(d));
  }
  const std::uint64_t payload = bytes.size() - kEmb1HeaderBytes;
  if (n > std::numeric_limits<std::uint64_t>::max() / 4 / d) {
    throw Error(ErrorCode::kTruncatedFile, "offset 8: n*d overflows");
  }
  const std::uint64_t expected = n * d * 4;
  if (payload < expected) {
    throw Error(ErrorCode::kTruncatedFile,
                "payload ends at offset " + std::to_string(bytes.size()) +
                    ", expected " + std::to_string(kEmb1HeaderBytes + expected));
  }
  if (payload > expected) {
    throw Error(ErrorCode::kTrailingBytes,
                "offset " + std::to_string(kEmb1HeaderBytes + expected) + ": " +
                    std::to_string(payload - expected) + " unexpected bytes");
  }

  RowMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  double* out = m.data();
  for (std::uint64_t k = 0; k < n * d; ++k) {
    const std::size_t offset = kEmb1HeaderBytes + 4 * k;
    const float f = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset));
    if (!std::isfinite(f)) {
      throw Error(ErrorCode::kNonFiniteValue,
                  "offset " + std::to_string(offset) + " (row " +
                      std::to_string(k / d) + ")");
    }
    out[k] = f;
  }
  return EmbeddingSet(std::move(m), static_cast<Modality>(modality));
}

EmbeddingSet load_embeddings(const std::filesystem::path& path,
                             EmbeddingFormat format) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  try {
    if (format == EmbeddingFormat::kEmb1) return decode_emb1(bytes);
    return parse_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                      bytes.size()));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path,
                     EmbeddingFormat format) {
  if (format == EmbeddingFormat::kEmb1) {
    write_file(path, encode_emb1(set));
  } else {
    const std::string text = format_csv(set);
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                               text.size()));
  }
}

EmbeddingSet normalize_rows(const EmbeddingSet& set) {
  RowMatrix m = set.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm < 1e-12) {
      throw Error(ErrorCode::kZeroNormRow, "row " + std::to_string(i));
    }
    m.row(i) /= norm;
  }
  return EmbeddingSet(std::move(m), set.modality());
}

void require_unit_rows(const EmbeddingSet& set, double tol) {
  const RowMatrix& m = set.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (std::abs(norm - 1.0) > tol) {
      throw Error(ErrorCode::kNotNormalized,
                  "row " + std::to_string(i) + " has norm " + std::to_string(norm));
    }
  }
}

PairedEmbeddings pair(EmbeddingSet image, EmbeddingSet text) {
  if (image.n() != text.n() || image.d() != text.d()) {
    throw Error(ErrorCode::kShapeMismatch,
                "image is " + std::to_string(image.n()) + "x" +
                    std::to_string(image.d()) + ", text is " +
                    std::to_string(text.n()) + "x" + std::to_string(text.d()));
  }
  if (image.modality() == Modality::kLanguage ||
      text.modality() == Modality::kVision) {
    throw Error(ErrorCode::kShapeMismatch, "image/text modalities are swapped");
  }
  return {std::move(image), std::move(text)};
}

EmbeddingSet concat_rows(std::span<const EmbeddingSet> parts) {
  if (parts.empty()) throw Error(ErrorCode::kDimensionZero, "nothing to concatenate");
  Eigen::Index rows = 0;
  const Eigen::Index cols = static_cast<Eigen::Index>(parts.front().d());
  Modality modality = parts.front().modality();
  for (const auto& p : parts) {
    if (static_cast<Eigen::Index>(p.d()) != cols) {
      throw Error(ErrorCode::kShapeMismatch, "concatenated sets differ in d");
    }
    if (p.modality() != modality) modality = Modality::kUnknown;
    rows += static_cast<Eigen::Index>(p.n());
  }
  RowMatrix m(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    m.middleRows(at, p.matrix().rows()) = p.matrix();
    at += p.matrix().rows();
  }
  return EmbeddingSet(std::move(m), modality);
}

EmbeddingSet gather_rows(const EmbeddingSet& set,
                         std::span<const std::size_t> indices) {
  RowMatrix m(static_cast<Eigen::Index>(indices.size()),
              static_cast<Eigen::Index>(set.d()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= set.n()) {
      throw Error(ErrorCode::kIndexOutOfRange, std::to_string(indices[k]));
    }
    m.row(static_cast<Eigen::Index>(k)) =
        set.matrix().row(static_cast<Eigen::Index>(indices[k]));
  }
  return EmbeddingSet(std::move(m), set.modality());
}

}  // namespace datasel
