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

#ifndef DATASEL_PARALLEL_H_
#define DATASEL_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace datasel {

// Tile edge used by every blocked matrix product in the library.
inline constexpr std::size_t kTileSize = 1024;

// Process-wide worker count; 0 restores the hardware default.
void set_thread_count(std::size_t threads);
std::size_t thread_count();

// Calls body(i) for every i in [0, count). Work items must write disjoint
// outputs; callers keep reductions inside a single item (or combine per-item
// partials in index order afterwards) so results never depend on the number
// of workers. The first exception by item index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace datasel

#endif  // DATASEL_PARALLEL_H_
