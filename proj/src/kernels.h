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

// Internal numeric kernels shared by the scoring modules.

#ifndef DATASEL_SRC_KERNELS_H_
#define DATASEL_SRC_KERNELS_H_

#include <algorithm>
#include <cstddef>
#include <span>

#include "datasel/embeddings.h"
#include "datasel/parallel.h"

namespace datasel::internal {

// Left-to-right sum; the fixed order keeps results independent of alignment.
inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

inline std::size_t tile_count(std::size_t n) {
  return (n + kTileSize - 1) / kTileSize;
}

// Calls body(rows_begin, rows_end) for every row tile of an n-row matrix,
// tiles in parallel.
template <typename Body>
void for_each_row_tile(std::size_t n, Body&& body) {
  parallel_for(tile_count(n), [&](std::size_t t) {
    const std::size_t begin = t * kTileSize;
    body(begin, std::min(n, begin + kTileSize));
  });
}

// Sum of X^T Y over rows, accumulated tile by tile: tiles are multiplied in
// parallel and their partial products added in tile order.
Eigen::MatrixXd tiled_cross_product(const RowMatrix& x, const RowMatrix& y);

}  // namespace datasel::internal

#endif  // DATASEL_SRC_KERNELS_H_
