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

#include "datasel/scores_quality.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "datasel/error.h"
#include "datasel/random.h"
#include "kernels.h"

namespace datasel {
namespace {

using internal::dot;

// Running log-sum-exp: value = max + log(sum).
struct LogSumExp {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;

  double value() const { return max + std::log(sum); }
};

// For each row i of `rows`, log sum_j exp((<rows_i, cols_j> - self_i) / tau)
// with the j == i term fixed at exp(0). Both matrices hold the batch members
// in the same order.
std::vector<double> shifted_log_partition(const RowMatrix& rows,
                                          const RowMatrix& cols,
                                          std::span<const double> self,
                                          double tau) {
  const std::size_t b = static_cast<std::size_t>(rows.rows());
  std::vector<double> out(b);
  internal::for_each_row_tile(b, [&](std::size_t r0, std::size_t r1) {
    const Eigen::Index rn = static_cast<Eigen::Index>(r1 - r0);
    std::vector<LogSumExp> acc(r1 - r0);
    Eigen::MatrixXd tile;
    std::vector<double> v;
    for (std::size_t c0 = 0; c0 < b; c0 += kTileSize) {
      const std::size_t c1 = std::min(b, c0 + kTileSize);
      tile.noalias() = rows.middleRows(static_cast<Eigen::Index>(r0), rn) *
                       cols.middleRows(static_cast<Eigen::Index>(c0),
                                       static_cast<Eigen::Index>(c1 - c0))
                           .transpose();
      v.resize(c1 - c0);
      for (std::size_t i = r0; i < r1; ++i) {
        double tile_max = -std::numeric_limits<double>::infinity();
        for (std::size_t j = c0; j < c1; ++j) {
          const double x =
              j == i ? 0.0
                     : (tile(static_cast<Eigen::Index>(i - r0),
                             static_cast<Eigen::Index>(j - c0)) -
                        self[i]) / tau;
          v[j - c0] = x;
          tile_max = std::max(tile_max, x);
        }
        LogSumExp& a = acc[i - r0];
        const double shift = std::max(a.max, tile_max);
        double s = a.sum * std::exp(a.max - shift);
        for (double x : v) s += std::exp(x - shift);
        a.max = shift;
        a.sum = s;
      }
    }
    for (std::size_t i = r0; i < r1; ++i) out[i] = acc[i - r0].value();
  });
  return out;
}

struct BatchTerms {
  std::vector<double> self;     // s_ii
  std::vector<double> row_lse;  // image i against every text in the batch
  std::vector<double> col_lse;  // text i against every image in the batch
};

BatchTerms batch_terms(const PairedEmbeddings& pool,
                       std::span<const std::size_t> batch, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::kInvalidTemperature, "tau must be positive, got " +
                                                    format_number(tau));
  }
  for (std::size_t idx : batch) {
    if (idx >= pool.n()) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "batch index " + std::to_string(idx) + " >= n=" +
                      std::to_string(pool.n()));
    }
  }
  std::vector<std::size_t> sorted(batch.begin(), batch.end());
  std::sort(sorted.begin(), sorted.end());
  const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "batch index " + std::to_string(*dup) + " repeated");
  }

  const Eigen::Index b = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index d = static_cast<Eigen::Index>(pool.d());
  RowMatrix images(b, d);
  RowMatrix texts(b, d);
  BatchTerms terms;
  terms.self.resize(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(batch[k]);
    images.row(static_cast<Eigen::Index>(k)) = pool.image.matrix().row(i);
    texts.row(static_cast<Eigen::Index>(k)) = pool.text.matrix().row(i);
    terms.self[k] = dot(pool.image.row(batch[k]), pool.text.row(batch[k]));
  }
  terms.row_lse = shifted_log_partition(images, texts, terms.self, tau);
  terms.col_lse = shifted_log_partition(texts, images, terms.self, tau);
  return terms;
}

}  // namespace

BatchDivisionPlan::BatchDivisionPlan(std::size_t n, std::size_t batch_size,
                                     std::size_t rounds, std::uint64_t seed)
    : n_(n), batch_size_(batch_size), seed_(seed) {
  if (n == 0 || batch_size == 0 || rounds == 0) {
    throw Error(ErrorCode::kInvalidParameter,
                "batch plan needs n, batch size and rounds >= 1");
  }
  permutations_.reserve(rounds);
  for (std::size_t k = 0; k < rounds; ++k) {
    permutations_.push_back(random_permutation(n, seed, k));
  }
}

std::span<const std::size_t> BatchDivisionPlan::chunk(std::size_t round,
                                                      std::size_t c) const {
  const std::size_t begin = c * batch_size_;
  const std::size_t end = std::min(n_, begin + batch_size_);
  return permutation(round).subspan(begin, end - begin);
}

BatchDivisionPlan make_batch_plan(std::size_t n, std::size_t batch_size,
                                  std::size_t rounds, std::uint64_t seed) {
  return BatchDivisionPlan(n, batch_size, rounds, seed);
}

ScoreVector clip_score(const PairedEmbeddings& pool) {
  require_unit_rows(pool.image);
  require_unit_rows(pool.text);
  ScoreVector out;
  out.metric = "clipscore";
  out.higher_is_better = true;
  out.values.resize(pool.n());
  for (std::size_t i = 0; i < pool.n(); ++i) {
    out.values[i] = dot(pool.image.row(i), pool.text.row(i));
  }
  return out;
}

std::vector<double> normalization_terms(const PairedEmbeddings& pool,
                                        std::span<const std::size_t> batch,
                                        double tau) {
  const BatchTerms t = batch_terms(pool, batch, tau);
  std::vector<double> r(batch.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    r[k] = t.self[k] + 0.5 * tau * (t.row_lse[k] + t.col_lse[k]);
  }
  return r;
}

std::vector<double> batch_neg_clip_loss(const PairedEmbeddings& pool,
                                        std::span<const std::size_t> batch,
                                        double tau) {
  const BatchTerms t = batch_terms(pool, batch, tau);
  std::vector<double> q(batch.size());
  for (std::size_t k = 0; k < q.size(); ++k) {
    q[k] = -0.5 * tau * (t.row_lse[k] + t.col_lse[k]);
  }
  return q;
}

ScoreVector neg_clip_loss(const PairedEmbeddings& pool,
                          const BatchDivisionPlan& plan, double tau) {
  if (plan.n() != pool.n()) {
    throw Error(ErrorCode::kPlanMismatch,
                "plan covers n=" + std::to_string(plan.n()) + ", pool has n=" +
                    std::to_string(pool.n()));
  }
  require_unit_rows(pool.image);
  require_unit_rows(pool.text);

  std::vector<double> acc(pool.n(), 0.0);
  for (std::size_t k = 0; k < plan.rounds(); ++k) {
    for (std::size_t c = 0; c < plan.chunk_count(); ++c) {
      const auto members = plan.chunk(k, c);
      const std::vector<double> q = batch_neg_clip_loss(pool, members, tau);
      for (std::size_t m = 0; m < members.size(); ++m) acc[members[m]] += q[m];
    }
  }

  ScoreVector out;
  out.metric = "negcliploss";
  out.higher_is_better = true;
  out.values.resize(pool.n());
  const double rounds = static_cast<double>(plan.rounds());
  for (std::size_t i = 0; i < pool.n(); ++i) out.values[i] = acc[i] / rounds;
  out.params["tau"] = format_number(tau);
  out.params["batch_size"] = std::to_string(plan.batch_size());
  out.params["k"] = std::to_string(plan.rounds());
  out.params["seed"] = std::to_string(plan.seed());
  return out;
}

}  // namespace datasel
