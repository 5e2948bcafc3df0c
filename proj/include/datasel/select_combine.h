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

// Turning scores into selections, and composing selections.
//
// Ordering is always by score (descending when higher is better), ties going
// to the lower pool index. Outputs are sorted ascending.

#ifndef DATASEL_SELECT_COMBINE_H_
#define DATASEL_SELECT_COMBINE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "datasel/score_vector.h"
#include "datasel/selection.h"

namespace datasel {

// Published thresholds: CLIP score cuts for two teacher models, and the
// recommended NormSim_inf / NormSim_2 cuts.
inline constexpr double kClipThresholdL14 = 0.214;
inline constexpr double kClipThresholdB32 = 0.153;
inline constexpr double kNormSimInfThreshold = 0.7;
inline constexpr double kNormSim2Threshold = 0.15;

// How many items to keep: an absolute count, or a fraction of the candidates
// (rounded half up, at least one).
class Amount {
 public:
  static Amount count(std::size_t n) { return Amount(false, static_cast<double>(n)); }
  static Amount fraction(double phi) { return Amount(true, phi); }

  bool is_fraction() const { return fraction_; }
  double value() const { return value_; }

  // Number of items to keep out of `available`; throws EmptySelection for a
  // zero result and InvalidParameter when it exceeds `available`.
  std::size_t resolve(std::size_t available) const;

 private:
  Amount(bool fraction, double value) : fraction_(fraction), value_(value) {}
  bool fraction_;
  double value_;
};

// Scores restricted to a subset of the pool; indices stay pool positions.
struct MaskedScores {
  const ScoreVector* scores = nullptr;
  Selection within;
};

MaskedScores restrict(const ScoreVector& scores, const Selection& within);

// The k best candidates by (score, lower index), returned ascending.
std::vector<std::size_t> top_k(std::span<const double> values,
                               std::span<const std::size_t> candidates,
                               std::size_t k, bool higher_is_better);

Selection select_top(const ScoreVector& scores, Amount amount);
Selection select_top(const MaskedScores& masked, Amount amount);

enum class Keep { kAtLeast, kAtMost };

// Inclusive cut; an empty result is legal.
Selection select_threshold(const ScoreVector& scores, double threshold, Keep keep);

// Keep `first` of scores_a, then the best `final_amount` of those by
// scores_b. Fractions in the second stage refer to the survivors.
Selection two_stage(const ScoreVector& scores_a, Amount first,
                    const ScoreVector& scores_b, Amount final_amount);

Selection intersect(const Selection& a, const Selection& b);

// a followed by b, duplicates kept.
TrainingList union_oversample(const Selection& a, const Selection& b);

}  // namespace datasel

#endif  // DATASEL_SELECT_COMBINE_H_
