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

#include <doctest.h>

#include <vector>

#include "datasel/error.h"
#include "datasel/stats.h"
#include "oracles.h"

using namespace datasel;

TEST_CASE("average ranks share ties") {
  const std::vector<double> v{3.0, 1.0, 3.0, 2.0};
  CHECK(average_ranks(v) == std::vector<double>{3.5, 1.0, 3.5, 2.0});
}

TEST_CASE("spearman against the naive oracle") {
  const Eigen::MatrixXd m = oracle::random_matrix(40, 2, 1);
  std::vector<double> a, b;
  for (Eigen::Index i = 0; i < 40; ++i) {
    a.push_back(m(i, 0));
    b.push_back(m(i, 0) + 0.5 * m(i, 1));
  }
  b[3] = b[4];
  CHECK(spearman(a, b) == doctest::Approx(oracle::spearman(a, b)).epsilon(1e-12));
  const std::vector<double> up{1, 2, 3}, down{9, 5, 1}, flat{2, 2, 2};
  CHECK(spearman(up, up) == doctest::Approx(1.0));
  CHECK(spearman(up, down) == doctest::Approx(-1.0));
  CHECK(spearman(up, flat) == 0.0);
  CHECK_THROWS_AS(spearman(up, std::vector<double>{1, 2}), Error);
}

TEST_CASE("ols slope") {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  CHECK(ols_slope(x, y) == doctest::Approx(2.0));
  CHECK_THROWS_AS(ols_slope(std::vector<double>{1, 1}, std::vector<double>{1, 2}), Error);
}
