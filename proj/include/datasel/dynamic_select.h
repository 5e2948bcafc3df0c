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

// Greedy batch removal against the pool's own covariance (VAS-D / NormSim2-D).
//
// Starting from the whole pool S_0 (N_0 = n), step t = 1..T keeps the N_t
// highest-scoring members of S_{t-1}, where
//
//   Sigma_t = (1/|S_{t-1}|) sum_{j in S_{t-1}} f_j f_j^T
//   v_j     = f_j^T Sigma_t f_j
//   N_t     = round_half_up(N_0 - (t/T)(N_0 - N)),  clamped to <= N_{t-1}
//
// so N_T = N. Sigma is rebuilt from scratch at every step. With T = 1 this is
// plain top-N VAS against the full pool's self covariance.

#ifndef DATASEL_DYNAMIC_SELECT_H_
#define DATASEL_DYNAMIC_SELECT_H_

#include <cstddef>
#include <vector>

#include "datasel/embeddings.h"
#include "datasel/selection.h"

namespace datasel {

inline constexpr std::size_t kDefaultGreedySteps = 500;
inline constexpr std::size_t kVasGreedySteps = 168;

// N_1..N_T for a pool of n shrinking to target_n in `steps` steps.
std::vector<std::size_t> size_schedule(std::size_t n, std::size_t target_n,
                                       std::size_t steps);

// Throws InvalidTarget unless 1 <= target_n <= n, InvalidParameter for
// steps == 0.
Selection dynamic_select(const EmbeddingSet& pool, std::size_t target_n,
                         std::size_t steps = kDefaultGreedySteps);

}  // namespace datasel

#endif  // DATASEL_DYNAMIC_SELECT_H_
