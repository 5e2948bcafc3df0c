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

// Per-sample quality scores over an image/text pool.
//
// clip_score is the cosine similarity of each pair. neg_clip_loss subtracts
// from it the temperature-scaled log-partition of the sample inside randomly
// drawn training batches, averaged over K batch divisions:
//
//   R_i   = (tau/2) [ log sum_j exp(s_ij / tau) + log sum_j exp(s_ji / tau) ]
//   score = mean_k ( s_ii - R_i^(k) )
//
// with s_ij = <image_i, text_j> and j ranging over the batch of i in round k
// (j = i included). Higher is better for both scores.

#ifndef DATASEL_SCORES_QUALITY_H_
#define DATASEL_SCORES_QUALITY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "datasel/embeddings.h"
#include "datasel/score_vector.h"

namespace datasel {

inline constexpr double kDefaultTemperature = 0.01;
inline constexpr std::size_t kDefaultBatchSize = 32768;
inline constexpr std::size_t kDefaultRounds = 10;

// K random divisions of 0..n-1 into ceil(n/b) consecutive chunks of a
// permutation. Round k's permutation is Fisher-Yates over the counter stream
// keyed by (seed, k), so the plan is a pure function of (n, b, K, seed).
class BatchDivisionPlan {
 public:
  BatchDivisionPlan(std::size_t n, std::size_t batch_size, std::size_t rounds,
                    std::uint64_t seed);

  std::size_t n() const { return n_; }
  std::size_t batch_size() const { return batch_size_; }
  std::size_t rounds() const { return permutations_.size(); }
  std::uint64_t seed() const { return seed_; }
  std::size_t chunk_count() const { return (n_ + batch_size_ - 1) / batch_size_; }

  std::span<const std::size_t> permutation(std::size_t round) const {
    return permutations_[round];
  }
  // Members of chunk c in round k; every chunk but the last has batch_size.
  std::span<const std::size_t> chunk(std::size_t round, std::size_t c) const;

 private:
  std::size_t n_;
  std::size_t batch_size_;
  std::uint64_t seed_;
  std::vector<std::vector<std::size_t>> permutations_;
};

// Throws InvalidParameter unless n, b, K >= 1.
BatchDivisionPlan make_batch_plan(std::size_t n, std::size_t batch_size,
                                  std::size_t rounds, std::uint64_t seed);

// Requires unit-norm rows (NotNormalized otherwise, tolerance 1e-3).
ScoreVector clip_score(const PairedEmbeddings& pool);

// R_i for every member of `batch`, in batch order. The b x b similarity
// matrix is never formed; tiles of kTileSize are reduced with a running
// log-sum-exp in fixed tile order.
std::vector<double> normalization_terms(const PairedEmbeddings& pool,
                                        std::span<const std::size_t> batch,
                                        double tau);

// The per-round quantity s_ii - R_i for every member of `batch`, computed
// without cancellation (the diagonal term is exp(0) by construction).
std::vector<double> batch_neg_clip_loss(const PairedEmbeddings& pool,
                                        std::span<const std::size_t> batch,
                                        double tau);

ScoreVector neg_clip_loss(const PairedEmbeddings& pool,
                          const BatchDivisionPlan& plan, double tau);

}  // namespace datasel

#endif  // DATASEL_SCORES_QUALITY_H_
