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

#include "datasel/scores_target.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "datasel/error.h"
#include "kernels.h"

namespace datasel {
namespace {

void require_same_d(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + ": d=" +
                                               std::to_string(a) + " vs d=" +
                                               std::to_string(b));
  }
}

// Running (sum_t |g_t|^p)^(1/p) kept as scale * (sum (|g_t|/scale)^p)^(1/p)
// so large p neither overflows nor underflows.
struct PowerSum {
  double scale = 0.0;
  double sum = 0.0;

  void add(double g, double p) {
    const double a = std::abs(g);
    if (a == 0.0) return;
    if (a > scale) {
      sum = sum * std::pow(scale / a, p) + 1.0;
      scale = a;
    } else {
      sum += std::pow(a / scale, p);
    }
  }
  double value(double p) const {
    return scale == 0.0 ? 0.0 : scale * std::pow(sum, 1.0 / p);
  }
};

}  // namespace

TargetStatistics target_statistics(const EmbeddingSet& first,
                                   const EmbeddingSet& second) {
  if (first.n() != second.n()) {
    throw Error(ErrorCode::kShapeMismatch,
                "target sets have m=" + std::to_string(first.n()) + " and m=" +
                    std::to_string(second.n()));
  }
  require_same_d(first.d(), second.d(), "target sets");
  if (first.n() == 0) throw Error(ErrorCode::kEmptyTarget, "no target rows");

  TargetStatistics stats;
  stats.d = first.d();
  stats.m = first.n();
  stats.first = first.modality();
  stats.second = second.modality();
  stats.self = &first == &second || first.matrix() == second.matrix();
  stats.sigma = internal::tiled_cross_product(first.matrix(), second.matrix()) /
                static_cast<double>(stats.m);
  if (stats.self) {
    const Eigen::MatrixXd sym = 0.5 * (stats.sigma + stats.sigma.transpose());
    stats.sigma = sym;
  }
  return stats;
}

ScoreVector vas(const EmbeddingSet& pool_first, const EmbeddingSet& pool_second,
                const TargetStatistics& stats) {
  if (pool_first.n() != pool_second.n()) {
    throw Error(ErrorCode::kShapeMismatch, "pool modalities differ in n");
  }
  require_same_d(pool_first.d(), stats.d, "pool vs target");
  require_same_d(pool_second.d(), stats.d, "pool vs target");

  const std::size_t n = pool_first.n();
  ScoreVector out;
  out.metric = "vas";
  out.higher_is_better = true;
  out.values.resize(n);
  internal::for_each_row_tile(n, [&](std::size_t r0, std::size_t r1) {
    const Eigen::Index rn = static_cast<Eigen::Index>(r1 - r0);
    const RowMatrix projected =
        pool_first.matrix().middleRows(static_cast<Eigen::Index>(r0), rn) *
        stats.sigma;
    for (std::size_t i = r0; i < r1; ++i) {
      const auto row = projected.row(static_cast<Eigen::Index>(i - r0));
      out.values[i] = internal::dot({row.data(), stats.d}, pool_second.row(i));
    }
  });
  out.params["target_m"] = std::to_string(stats.m);
  return out;
}

ScoreVector normsim(const EmbeddingSet& pool, const EmbeddingSet& target,
                    NormOrder order) {
  require_same_d(pool.d(), target.d(), "pool vs target");
  if (!order.infinite && !(order.p >= 1.0 && std::isfinite(order.p))) {
    throw Error(ErrorCode::kInvalidNormOrder,
                "p must be >= 1 or inf, got " + format_number(order.p));
  }

  const std::size_t n = pool.n();
  const std::size_t m = target.n();
  ScoreVector out;
  out.metric = "normsim";
  out.higher_is_better = true;
  out.values.resize(n);
  internal::for_each_row_tile(n, [&](std::size_t r0, std::size_t r1) {
    const Eigen::Index rn = static_cast<Eigen::Index>(r1 - r0);
    std::vector<PowerSum> sums(r1 - r0);
    std::vector<double> best(r1 - r0, -std::numeric_limits<double>::infinity());
    Eigen::MatrixXd tile;
    for (std::size_t c0 = 0; c0 < m; c0 += kTileSize) {
      const std::size_t c1 = std::min(m, c0 + kTileSize);
      tile.noalias() =
          pool.matrix().middleRows(static_cast<Eigen::Index>(r0), rn) *
          target.matrix()
              .middleRows(static_cast<Eigen::Index>(c0),
                          static_cast<Eigen::Index>(c1 - c0))
              .transpose();
      for (Eigen::Index i = 0; i < rn; ++i) {
        for (Eigen::Index j = 0; j < tile.cols(); ++j) {
          const double g = tile(i, j);
          if (order.infinite) {
            best[i] = std::max(best[i], order.absolute_max ? std::abs(g) : g);
          } else {
            sums[i].add(g, order.p);
          }
        }
      }
    }
    for (std::size_t i = r0; i < r1; ++i) {
      out.values[i] = order.infinite ? best[i - r0] : sums[i - r0].value(order.p);
    }
  });
  out.params["p"] = order.infinite ? "inf" : format_number(order.p);
  if (order.infinite && order.absolute_max) out.params["inf_mode"] = "abs";
  out.params["target_m"] = std::to_string(m);
  return out;
}

ScoreVector nn_rank_score(const EmbeddingSet& pool, const EmbeddingSet& target) {
  require_same_d(pool.d(), target.d(), "pool vs target");
  const std::size_t n = pool.n();
  const std::size_t m = target.n();
  if (static_cast<double>(n) * static_cast<double>(m) > kNnRankMaxWork) {
    throw Error(ErrorCode::kTooLarge,
                "nn rank needs m*n <= 1e9, got " + std::to_string(m) + "*" +
                    std::to_string(n));
  }

  // Targets are split into one contiguous block per worker; the max-reduce
  // below is exact, so the split does not affect the result.
  const std::size_t blocks = std::min(thread_count(), m);
  std::vector<std::vector<std::size_t>> best(blocks,
                                             std::vector<std::size_t>(n, 0));
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t t0 = b * m / blocks;
    const std::size_t t1 = (b + 1) * m / blocks;
    std::vector<std::size_t> order(n);
    Eigen::VectorXd sim;
    for (std::size_t t = t0; t < t1; ++t) {
      sim.noalias() = pool.matrix() *
                      target.matrix().row(static_cast<Eigen::Index>(t)).transpose();
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
        const double sa = sim(static_cast<Eigen::Index>(a));
        const double sc = sim(static_cast<Eigen::Index>(c));
        return sa != sc ? sa > sc : a < c;
      });
      for (std::size_t pos = 0; pos < n; ++pos) {
        best[b][order[pos]] = std::max(best[b][order[pos]], n - pos);
      }
    }
  });

  ScoreVector out;
  out.metric = "nnrank";
  out.higher_is_better = true;
  out.values.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t v = 0;
    for (const auto& block : best) v = std::max(v, block[i]);
    out.values[i] = static_cast<double>(v);
  }
  out.params["target_m"] = std::to_string(m);
  return out;
}

}  // namespace datasel
