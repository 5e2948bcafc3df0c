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

// Embedding matrices and their on-disk formats.
//
// EMB1 layout (little-endian):
//
//   offset  size  field
//        0     4  ASCII "EMB1"
//        4     4  u32 version (1)
//        8     8  u64 n
//       16     4  u32 d
//       20     1  u8 modality (0 unknown, 1 vision, 2 language)
//       21     4  reserved, zero
//       25  4·n·d  binary32 values, row-major
//
// Values are held in binary64 once loaded. Saving rounds to binary32, so a
// load/save cycle is byte-identical and save/load is exact for any set whose
// entries are binary32-representable (every set that came from a file).
//
// The CSV form has no header: one sample per line, comma separated.

#ifndef DATASEL_EMBEDDINGS_H_
#define DATASEL_EMBEDDINGS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace datasel {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Modality : std::uint8_t { kUnknown = 0, kVision = 1, kLanguage = 2 };

enum class EmbeddingFormat { kEmb1, kCsv };

inline constexpr std::size_t kEmb1HeaderBytes = 25;

// n×d matrix of finite feature vectors for one modality. Immutable.
class EmbeddingSet {
 public:
  // Throws DimensionZero for an empty matrix and NonFiniteValue for NaN/Inf.
  explicit EmbeddingSet(RowMatrix data, Modality modality = Modality::kUnknown);

  std::size_t n() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(data_.cols()); }
  Modality modality() const { return modality_; }
  const RowMatrix& matrix() const { return data_; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * d(), d()};
  }

  EmbeddingSet with_modality(Modality modality) const;

 private:
  RowMatrix data_;
  Modality modality_;
};

struct PairedEmbeddings {
  EmbeddingSet image;
  EmbeddingSet text;

  std::size_t n() const { return image.n(); }
  std::size_t d() const { return image.d(); }
};

EmbeddingSet load_embeddings(const std::filesystem::path& path,
                             EmbeddingFormat format);
void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path,
                     EmbeddingFormat format);

// In-memory EMB1 codec; the file functions are thin wrappers over these.
std::vector<std::uint8_t> encode_emb1(const EmbeddingSet& set);
EmbeddingSet decode_emb1(std::span<const std::uint8_t> bytes);

// Rows divided by their L2 norm. Rows with norm < 1e-12 raise ZeroNormRow.
EmbeddingSet normalize_rows(const EmbeddingSet& set);

// Throws NotNormalized when some row norm differs from 1 by more than tol.
void require_unit_rows(const EmbeddingSet& set, double tol = 1e-3);

// Throws ShapeMismatch unless n and d agree; rejects swapped modalities.
PairedEmbeddings pair(EmbeddingSet image, EmbeddingSet text);

// Row-wise concatenation; all parts must share d.
EmbeddingSet concat_rows(std::span<const EmbeddingSet> parts);

// Rows at the given indices, in the given order.
EmbeddingSet gather_rows(const EmbeddingSet& set,
                         std::span<const std::size_t> indices);

}  // namespace datasel

#endif  // DATASEL_EMBEDDINGS_H_
