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

#include "kernels.h"

#include <vector>

namespace datasel::internal {

Eigen::MatrixXd tiled_cross_product(const RowMatrix& x, const RowMatrix& y) {
  const std::size_t n = static_cast<std::size_t>(x.rows());
  std::vector<Eigen::MatrixXd> partials(tile_count(n));
  parallel_for(partials.size(), [&](std::size_t t) {
    const Eigen::Index begin = static_cast<Eigen::Index>(t * kTileSize);
    const Eigen::Index rows =
        static_cast<Eigen::Index>(std::min(n, (t + 1) * kTileSize)) - begin;
    partials[t] = x.middleRows(begin, rows).transpose() * y.middleRows(begin, rows);
  });
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(x.cols(), y.cols());
  for (const auto& p : partials) sum += p;
  return sum;
}

}  // namespace datasel::internal
