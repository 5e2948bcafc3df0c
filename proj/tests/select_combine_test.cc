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

#include <algorithm>
#include <fstream>
#include <random>

#include "datasel/error.h"
#include "datasel/select_combine.h"
#include "datasel/selection.h"
#include "oracles.h"

using namespace datasel;

namespace {

ScoreVector scores_of(std::vector<double> v, bool higher = true) {
  ScoreVector s;
  s.values = std::move(v);
  s.metric = "test";
  s.higher_is_better = higher;
  return s;
}

Selection sel(std::size_t n, std::vector<std::size_t> idx) { return Selection(n, std::move(idx)); }

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::kIoError;
}

}  // namespace

TEST_CASE("selection invariants") {
  CHECK(code_of([] { sel(3, {0, 3}); }) == ErrorCode::kIndexOutOfRange);
  CHECK(code_of([] { sel(3, {1, 1}); }) == ErrorCode::kInvalidParameter);
  CHECK(code_of([] { sel(3, {2, 1}); }) == ErrorCode::kInvalidParameter);
  const std::vector<std::size_t> raw{4, 1, 4, 0};
  CHECK(Selection::from_unsorted(5, raw).indices() == std::vector<std::size_t>{0, 1, 4});
  CHECK(Selection::all(3).indices() == std::vector<std::size_t>{0, 1, 2});
  CHECK(sel(5, {1, 3}).contains(3));
  CHECK(!sel(5, {1, 3}).contains(2));
}

TEST_CASE("select_top examples") {
  CHECK(select_top(scores_of({0.3, 0.9, 0.5}), Amount::fraction(1.0)).size() == 3);
  CHECK(select_top(scores_of({0.3, 0.9, 0.5}), Amount::count(2)).indices() ==
        std::vector<std::size_t>{1, 2});
  CHECK(select_top(scores_of({1, 1, 1, 1, 1}), Amount::count(3)).indices() ==
        std::vector<std::size_t>{0, 1, 2});
  CHECK(select_top(scores_of({0.3, 0.9, 0.5}, false), Amount::count(1)).indices() ==
        std::vector<std::size_t>{0});
  CHECK(code_of([] { select_top(scores_of({1, 2}), Amount::count(0)); }) ==
        ErrorCode::kEmptySelection);
  CHECK(code_of([] { select_top(scores_of({1, 2}), Amount::count(3)); }) ==
        ErrorCode::kInvalidParameter);
  CHECK(code_of([] { select_top(scores_of({1, 2}), Amount::fraction(1.5)); }) ==
        ErrorCode::kInvalidParameter);
}

TEST_CASE("fraction rounding is half up with a floor of one") {
  CHECK(Amount::fraction(0.3).resolve(10) == 3);
  CHECK(Amount::fraction(0.25).resolve(10) == 3);
  CHECK(Amount::fraction(0.24).resolve(10) == 2);
  CHECK(Amount::fraction(0.01).resolve(10) == 1);
  CHECK(Amount::fraction(0.667).resolve(3000) == 2001);
}

TEST_CASE("select_top maximizes the selected total") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n = 1; n <= 9; ++n) {
    std::vector<double> v(n);
    for (double& x : v) x = u(gen);
    for (std::size_t k = 1; k <= n; ++k) {
      const Selection s = select_top(scores_of(v), Amount::count(k));
      double got = 0.0;
      for (std::size_t i : s.indices()) got += v[i];
      double best = -1e300;
      oracle::for_each_subset(n, k, [&](const std::vector<std::size_t>& c) {
        double t = 0.0;
        for (std::size_t i : c) t += v[i];
        best = std::max(best, t);
      });
      CHECK(got == doctest::Approx(best).epsilon(1e-12));
    }
  }
}

TEST_CASE("select_top is invariant to monotone transforms") {
  const std::vector<double> v{0.2, -1.0, 3.0, 0.7, 0.71, -0.3};
  std::vector<double> w;
  for (double x : v) w.push_back(std::exp(3.0 * x) - 5.0);
  CHECK(select_top(scores_of(v), Amount::count(3)) == select_top(scores_of(w), Amount::count(3)));
}

TEST_CASE("select_threshold is inclusive") {
  const ScoreVector s = scores_of({0.1, 0.214, 0.3});
  CHECK(select_threshold(s, 0.214, Keep::kAtLeast).indices() == std::vector<std::size_t>{1, 2});
  CHECK(select_threshold(s, 0.214, Keep::kAtMost).indices() == std::vector<std::size_t>{0, 1});
  CHECK(select_threshold(s, -5.0, Keep::kAtLeast).size() == 3);
  CHECK(select_threshold(s, 5.0, Keep::kAtLeast).empty());
  CHECK(kClipThresholdL14 == 0.214);
  CHECK(kClipThresholdB32 == 0.153);
  CHECK(kNormSimInfThreshold == 0.7);
  CHECK(kNormSim2Threshold == 0.15);
}

TEST_CASE("restrict examples") {
  const ScoreVector s = scores_of({0.9, 0.1, 0.5});
  CHECK(select_top(restrict(s, Selection::all(3)), Amount::count(2)) ==
        select_top(s, Amount::count(2)));
  CHECK(select_top(restrict(s, sel(3, {1})), Amount::count(1)).indices() ==
        std::vector<std::size_t>{1});
  CHECK(select_top(restrict(s, sel(3, {1, 2})), Amount::count(1)).indices() ==
        std::vector<std::size_t>{2});
  CHECK(select_top(restrict(s, sel(3, {0, 1, 2})), Amount::fraction(0.5)).size() == 2);
  CHECK(code_of([&] { restrict(s, sel(4, {0})); }) == ErrorCode::kIndexOutOfRange);
}

TEST_CASE("two_stage examples") {
  const ScoreVector a = scores_of({0.5, 0.1, 0.9, 0.3, 0.7, 0.2, 0.8, 0.4, 0.6, 0.0});
  const ScoreVector b = scores_of({0.1, 0.9, 0.2, 0.8, 0.3, 0.7, 0.4, 0.6, 0.5, 1.0});
  CHECK(two_stage(a, Amount::fraction(1.0), b, Amount::count(3)) ==
        select_top(b, Amount::count(3)));
  CHECK(two_stage(a, Amount::fraction(0.5), a, Amount::count(5)) ==
        select_top(a, Amount::fraction(0.5)));
  // Stage A keeps {0,2,4,6,8}; their B scores are 0.1,0.2,0.3,0.4,0.5.
  CHECK(two_stage(a, Amount::fraction(0.5), b, Amount::count(3)).indices() ==
        std::vector<std::size_t>{4, 6, 8});
  CHECK(code_of([&] { two_stage(a, Amount::fraction(0.5), scores_of({1, 2}), Amount::count(1)); }) ==
        ErrorCode::kPoolMismatch);
}

TEST_CASE("intersect and union") {
  const Selection a = sel(6, {0, 2, 4});
  const Selection b = sel(6, {2, 3, 4});
  CHECK(intersect(a, a) == a);
  CHECK(intersect(a, sel(6, {1, 3})).empty());
  CHECK(intersect(a, b).indices() == std::vector<std::size_t>{2, 4});
  CHECK(intersect(a, b) == intersect(b, a));
  CHECK(code_of([&] { intersect(a, sel(7, {0})); }) == ErrorCode::kPoolMismatch);

  const TrainingList u = union_oversample(sel(3, {0, 1}), sel(3, {1, 2}));
  CHECK(u.entries == std::vector<std::size_t>{0, 1, 1, 2});
  CHECK(u.unique_count() == 3);
  CHECK(union_oversample(a, Selection(6, {})).entries == a.indices());
  const TrainingList twice = union_oversample(a, a);
  CHECK(twice.entries == std::vector<std::size_t>{0, 2, 4, 0, 2, 4});
  CHECK(twice.unique_count() == 3);
  CHECK(code_of([&] { union_oversample(a, sel(7, {0})); }) == ErrorCode::kPoolMismatch);
}

TEST_CASE("selection and training list files") {
  const auto dir = oracle::scratch_dir("selection_files");
  const Selection a = sel(10, {1, 5, 7});
  write_selection(a, dir / "a.sel", {{"metric", "vas"}});
  CHECK(read_selection(dir / "a.sel") == a);
  const std::string text = oracle::slurp(dir / "a.sel");
  CHECK(text.find("# pool_n=10\n") != std::string::npos);
  CHECK(text.substr(text.size() - 6) == "1\n5\n7\n");

  {
    std::ofstream(dir / "plain.sel") << "2\n4\n";
    std::ofstream(dir / "bad.sel") << "2\nx\n";
  }
  const Selection plain = read_selection(dir / "plain.sel");
  CHECK(plain.indices() == std::vector<std::size_t>{2, 4});
  CHECK(plain.pool_n() == 5);
  CHECK(code_of([&] { read_selection(dir / "bad.sel"); }) == ErrorCode::kParseError);

  const TrainingList list = union_oversample(a, sel(10, {5, 9}));
  write_training_list(list, dir / "u.list");
  const std::string body = oracle::slurp(dir / "u.list");
  CHECK(body.rfind("# unique=4\n", 0) == 0);
  const TrainingList back = read_training_list(dir / "u.list");
  CHECK(back.entries == list.entries);
  CHECK(back.pool_n == 10);
}
