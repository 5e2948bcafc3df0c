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

#include "datasel/dynamic_select.h"

#include <numeric>
#include <string>

#include "datasel/error.h"
#include "datasel/scores_target.h"
#include "datasel/select_combine.h"

namespace datasel {

std::vector<std::size_t> size_schedule(std::size_t n, std::size_t target_n,
                                       std::size_t steps) {
  // N_0 - t*(N_0 - N)/T rounded half up, in exact integer arithmetic:
  // floor((2*(N_0*T - t*D) + T) / (2*T)).
  const unsigned __int128 total = n;
  const unsigned __int128 drop = n - target_n;
  const unsigned __int128 t_steps = steps;
  std::vector<std::size_t> sizes(steps);
  std::size_t prev = n;
  for (std::size_t t = 1; t <= steps; ++t) {
    const unsigned __int128 numer = total * t_steps - drop * t;
    const auto rounded =
        static_cast<std::size_t>((2 * numer + t_steps) / (2 * t_steps));
    prev = std::min(prev, rounded);
    sizes[t - 1] = prev;
  }
  return sizes;
}

Selection dynamic_select(const EmbeddingSet& pool, std::size_t target_n,
                         std::size_t steps) {
  const std::size_t n = pool.n();
  if (target_n < 1 || target_n > n) {
    throw Error(ErrorCode::kInvalidTarget,
                "target size " + std::to_string(target_n) + " not in [1, " +
                    std::to_string(n) + "]");
  }
  if (steps == 0) throw Error(ErrorCode::kInvalidParameter, "steps must be >= 1");

  std::vector<std::size_t> current = Selection::all(n).indices();
  std::vector<std::size_t> positions;
  for (std::size_t target : size_schedule(n, target_n, steps)) {
    if (target == current.size()) continue;
    // Scores are computed on the gathered survivors so that step 1 is the
    // exact static computation over the full pool.
    const EmbeddingSet survivors = gather_rows(pool, current);
    const TargetStatistics stats = target_statistics(survivors, survivors);
    const ScoreVector scores = vas(survivors, survivors, stats);
    positions.resize(current.size());
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    const std::vector<std::size_t> keep =
        top_k(scores.values, positions, target, /*higher_is_better=*/true);
    std::vector<std::size_t> next(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) next[k] = current[keep[k]];
    current = std::move(next);
  }
  return Selection(n, std::move(current));
}

}  // namespace datasel
