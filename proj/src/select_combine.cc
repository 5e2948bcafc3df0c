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

#include "datasel/select_combine.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

#include "datasel/error.h"

namespace datasel {
namespace {

void require_same_pool(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kPoolMismatch, "pool sizes " + std::to_string(a) +
                                              " and " + std::to_string(b));
  }
}

}  // namespace

std::size_t Amount::resolve(std::size_t available) const {
  if (!std::isfinite(value_) || value_ < 0.0) {
    throw Error(ErrorCode::kInvalidParameter,
                "amount must be nonnegative, got " + format_number(value_));
  }
  std::size_t k;
  if (fraction_) {
    if (value_ > 1.0) {
      throw Error(ErrorCode::kInvalidParameter,
                  "fraction must be in (0, 1], got " + format_number(value_));
    }
    if (value_ == 0.0 || available == 0) {
      throw Error(ErrorCode::kEmptySelection, "fraction selects nothing");
    }
    k = static_cast<std::size_t>(
        std::floor(value_ * static_cast<double>(available) + 0.5));
    k = std::max<std::size_t>(k, 1);
  } else {
    k = static_cast<std::size_t>(value_);
    if (k == 0) throw Error(ErrorCode::kEmptySelection, "count must be >= 1");
  }
  if (k > available) {
    throw Error(ErrorCode::kInvalidParameter,
                "cannot keep " + std::to_string(k) + " of " +
                    std::to_string(available) + " candidates");
  }
  return k;
}

MaskedScores restrict(const ScoreVector& scores, const Selection& within) {
  if (within.pool_n() != scores.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "selection over pool_n=" + std::to_string(within.pool_n()) +
                    " applied to " + std::to_string(scores.size()) + " scores");
  }
  return MaskedScores{&scores, within};
}

std::vector<std::size_t> top_k(std::span<const double> values,
                               std::span<const std::size_t> candidates,
                               std::size_t k, bool higher_is_better) {
  std::vector<std::size_t> order(candidates.begin(), candidates.end());
  k = std::min(k, order.size());
  auto better = [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) {
      return higher_is_better ? values[a] > values[b] : values[a] < values[b];
    }
    return a < b;
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                   order.end(), better);
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

Selection select_top(const ScoreVector& scores, Amount amount) {
  return select_top(restrict(scores, Selection::all(scores.size())), amount);
}

Selection select_top(const MaskedScores& masked, Amount amount) {
  const ScoreVector& s = *masked.scores;
  const std::size_t k = amount.resolve(masked.within.size());
  return Selection(s.size(), top_k(s.values, masked.within.indices(), k,
                                   s.higher_is_better));
}

Selection select_threshold(const ScoreVector& scores, double threshold, Keep keep) {
  if (!std::isfinite(threshold)) {
    throw Error(ErrorCode::kInvalidParameter, "threshold must be finite");
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double v = scores.values[i];
    if (keep == Keep::kAtLeast ? v >= threshold : v <= threshold) kept.push_back(i);
  }
  return Selection(scores.size(), std::move(kept));
}

Selection two_stage(const ScoreVector& scores_a, Amount first,
                    const ScoreVector& scores_b, Amount final_amount) {
  require_same_pool(scores_a.size(), scores_b.size());
  const Selection stage_a = select_top(scores_a, first);
  return select_top(restrict(scores_b, stage_a), final_amount);
}

Selection intersect(const Selection& a, const Selection& b) {
  require_same_pool(a.pool_n(), b.pool_n());
  std::vector<std::size_t> out;
  std::set_intersection(a.indices().begin(), a.indices().end(), b.indices().begin(),
                        b.indices().end(), std::back_inserter(out));
  return Selection(a.pool_n(), std::move(out));
}

TrainingList union_oversample(const Selection& a, const Selection& b) {
  require_same_pool(a.pool_n(), b.pool_n());
  TrainingList list;
  list.pool_n = a.pool_n();
  list.entries = a.indices();
  list.entries.insert(list.entries.end(), b.indices().begin(), b.indices().end());
  return list;
}

}  // namespace datasel
