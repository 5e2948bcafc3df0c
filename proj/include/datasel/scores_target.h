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

// Scores that measure how a pool sample lines up with a target set.
//
//   vas        f1(x)^T Sigma f2(x),   Sigma = (1/m) sum_t f1(t) f2(t)^T
//   normsim    || [<f_t, f_x>]_t ||_p over the target rows t
//   nn_rank    best per-target similarity rank of x within the pool
//
// Note: normsim_2(x)^2 == m * vas(x, x; self covariance of the target).

#ifndef DATASEL_SCORES_TARGET_H_
#define DATASEL_SCORES_TARGET_H_

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "datasel/embeddings.h"
#include "datasel/score_vector.h"

namespace datasel {

struct TargetStatistics {
  std::size_t d = 0;
  std::size_t m = 0;
  Eigen::MatrixXd sigma;  // d x d
  Modality first = Modality::kUnknown;
  Modality second = Modality::kUnknown;
  bool self = false;  // both factors came from the same set
};

// Mean outer product of matching target rows. Pass the same set twice for
// the self covariance (the result is then exactly symmetric).
TargetStatistics target_statistics(const EmbeddingSet& first,
                                   const EmbeddingSet& second);

ScoreVector vas(const EmbeddingSet& pool_first, const EmbeddingSet& pool_second,
                const TargetStatistics& stats);

// Norm order for normsim: a finite p >= 1, or infinity. For infinity the
// signed maximum similarity is used unless `absolute_max` is set.
struct NormOrder {
  double p = 2.0;
  bool infinite = false;
  bool absolute_max = false;

  static NormOrder finite(double p) { return {p, false, false}; }
  static NormOrder infinity(bool absolute = false) { return {0.0, true, absolute}; }
};

ScoreVector normsim(const EmbeddingSet& pool, const EmbeddingSet& target,
                    NormOrder order);

// Refuses work when m * n exceeds this many similarity evaluations.
inline constexpr double kNnRankMaxWork = 1e9;

ScoreVector nn_rank_score(const EmbeddingSet& pool, const EmbeddingSet& target);

}  // namespace datasel

#endif  // DATASEL_SCORES_TARGET_H_
