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
#include <cmath>
#include <numeric>

#include "datasel/error.h"
#include "datasel/parallel.h"
#include "datasel/scores_target.h"
#include "datasel/select_combine.h"
#include "oracles.h"

using namespace datasel;

namespace {

EmbeddingSet unit_set(std::size_t n, std::size_t d, unsigned seed,
                      Modality m = Modality::kVision) {
  return EmbeddingSet(oracle::random_unit_rows(n, d, seed), m);
}

EmbeddingSet basis(std::initializer_list<int> axes, std::size_t d) {
  RowMatrix m = RowMatrix::Zero(static_cast<Eigen::Index>(axes.size()),
                                static_cast<Eigen::Index>(d));
  Eigen::Index i = 0;
  for (int a : axes) m(i++, a) = 1.0;
  return EmbeddingSet(m, Modality::kVision);
}

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

TEST_CASE("target_statistics examples") {
  const EmbeddingSet e1 = basis({0}, 3);
  const TargetStatistics one = target_statistics(e1, e1);
  CHECK(one.sigma(0, 0) == 1.0);
  CHECK(one.sigma.sum() == 1.0);
  CHECK(one.self);

  const EmbeddingSet e12 = basis({0, 1}, 3);
  const TargetStatistics two = target_statistics(e12, e12);
  CHECK(two.sigma(0, 0) == 0.5);
  CHECK(two.sigma(1, 1) == 0.5);
  CHECK(two.sigma(2, 2) == 0.0);
  CHECK(two.m == 2);

  const EmbeddingSet t = unit_set(50, 8, 1);
  const TargetStatistics r = target_statistics(t, t);
  CHECK(std::abs(r.sigma.trace() - 1.0) <= 1e-9);
  CHECK((r.sigma - r.sigma.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r.sigma);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10);

  CHECK(code_of([&] { target_statistics(t, unit_set(49, 8, 2)); }) == ErrorCode::kShapeMismatch);
  CHECK(code_of([&] { target_statistics(t, unit_set(50, 7, 2)); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("vas examples") {
  RowMatrix eye = RowMatrix::Identity(4, 4);
  const EmbeddingSet id(eye);
  // sigma = I/4 from the four basis targets.
  const TargetStatistics stats = target_statistics(id, id);
  const EmbeddingSet x = unit_set(5, 4, 3);
  for (double v : vas(x, x, stats).values) CHECK(v == doctest::Approx(0.25).epsilon(1e-14));

  const EmbeddingSet e1 = basis({0}, 3);
  const EmbeddingSet e2 = basis({1}, 3);
  CHECK(vas(e2, e2, target_statistics(e1, e1)).values[0] == 0.0);
}

TEST_CASE("vas matches the triple-loop oracle") {
  const EmbeddingSet t1 = unit_set(2, 4, 4);
  const EmbeddingSet t2 = unit_set(2, 4, 5, Modality::kLanguage);
  const EmbeddingSet x1 = unit_set(3, 4, 6);
  const EmbeddingSet x2 = unit_set(3, 4, 7, Modality::kLanguage);
  const auto self = vas(x1, x1, target_statistics(t1, t1));
  const auto want_self = oracle::vas(oracle::to_rows(x1.matrix()), oracle::to_rows(x1.matrix()),
                                     oracle::to_rows(t1.matrix()), oracle::to_rows(t1.matrix()));
  const auto cross = vas(x1, x2, target_statistics(t1, t2));
  const auto want_cross = oracle::vas(oracle::to_rows(x1.matrix()), oracle::to_rows(x2.matrix()),
                                      oracle::to_rows(t1.matrix()), oracle::to_rows(t2.matrix()));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(self.values[i] - want_self[i]) <= 1e-10);
    CHECK(std::abs(cross.values[i] - want_cross[i]) <= 1e-10);
  }
  CHECK(self.metric == "vas");
  CHECK(self.params.at("target_m") == "2");
  CHECK(code_of([&] { vas(x1, unit_set(4, 4, 8), target_statistics(t1, t1)); }) ==
        ErrorCode::kShapeMismatch);
  CHECK(code_of([&] { vas(unit_set(3, 5, 8), unit_set(3, 5, 9), target_statistics(t1, t1)); }) ==
        ErrorCode::kShapeMismatch);
}

TEST_CASE("vas argsort is invariant to scaling the target covariance") {
  const EmbeddingSet t = unit_set(30, 6, 9);
  const EmbeddingSet x = unit_set(100, 6, 10);
  TargetStatistics stats = target_statistics(t, t);
  const ScoreVector a = vas(x, x, stats);
  stats.sigma *= 7.5;
  const ScoreVector b = vas(x, x, stats);
  CHECK(select_top(a, Amount::count(20)) == select_top(b, Amount::count(20)));
}

TEST_CASE("normsim examples") {
  const EmbeddingSet target = unit_set(5, 6, 11);
  const std::vector<std::size_t> pick{2};
  const EmbeddingSet present = gather_rows(target, pick);
  CHECK(normsim(present, target, NormOrder::infinity()).values[0] ==
        doctest::Approx(1.0).epsilon(1e-14));

  const EmbeddingSet e3 = basis({2}, 3);
  const EmbeddingSet others = basis({0, 1}, 3);
  CHECK(normsim(e3, others, NormOrder::finite(2)).values[0] == 0.0);

  CHECK(code_of([&] { normsim(e3, others, NormOrder::finite(0.5)); }) ==
        ErrorCode::kInvalidNormOrder);
  CHECK(code_of([&] { normsim(e3, unit_set(2, 4, 1), NormOrder::finite(2)); }) ==
        ErrorCode::kShapeMismatch);
}

TEST_CASE("normsim matches the naive loop oracle") {
  const EmbeddingSet target = unit_set(3, 5, 12);
  const EmbeddingSet pool = unit_set(7, 5, 13);
  const auto t = oracle::to_rows(target.matrix());
  const auto p = oracle::to_rows(pool.matrix());
  for (double order : {1.0, 2.0, 3.5}) {
    const auto got = normsim(pool, target, NormOrder::finite(order)).values;
    const auto want = oracle::normsim(p, t, order, false);
    for (std::size_t i = 0; i < 7; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-10);
  }
  const auto got = normsim(pool, target, NormOrder::infinity()).values;
  const auto want = oracle::normsim(p, t, 0.0, true);
  for (std::size_t i = 0; i < 7; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-10);
}

TEST_CASE("signed and absolute infinity norms") {
  RowMatrix pool(1, 2), target(2, 2);
  pool << 1, 0;
  target << -1, 0, 0, 1;
  const EmbeddingSet p(pool), t(target);
  CHECK(normsim(p, t, NormOrder::infinity(false)).values[0] == 0.0);
  CHECK(normsim(p, t, NormOrder::infinity(true)).values[0] == 1.0);
  CHECK(normsim(p, t, NormOrder::infinity(true)).params.at("inf_mode") == "abs");
}

TEST_CASE("large finite p approaches the max absolute dot") {
  const EmbeddingSet target = unit_set(20, 8, 14);
  const EmbeddingSet pool = unit_set(50, 8, 15);
  const auto p64 = normsim(pool, target, NormOrder::finite(64)).values;
  const auto inf = normsim(pool, target, NormOrder::infinity(true)).values;
  for (std::size_t i = 0; i < 50; ++i) CHECK(std::abs(p64[i] - inf[i]) <= inf[i] * 0.05 + 1e-3);
}

TEST_CASE("normsim squared equals m times self VAS") {
  const EmbeddingSet target = unit_set(40, 12, 16);
  const EmbeddingSet pool = unit_set(60, 12, 17);
  const auto ns = normsim(pool, target, NormOrder::finite(2)).values;
  const auto v = vas(pool, pool, target_statistics(target, target)).values;
  for (std::size_t i = 0; i < 60; ++i) CHECK(std::abs(ns[i] * ns[i] - 40.0 * v[i]) <= 1e-9);
}

TEST_CASE("nn_rank examples and oracle") {
  const EmbeddingSet one = unit_set(1, 4, 18);
  CHECK(nn_rank_score(one, unit_set(3, 4, 19)).values[0] == 1.0);

  const EmbeddingSet pool = unit_set(4, 3, 20);
  const std::vector<std::size_t> pick{2};
  CHECK(nn_rank_score(pool, gather_rows(pool, pick)).values[2] == 4.0);

  const EmbeddingSet target = unit_set(2, 3, 21);
  const auto got = nn_rank_score(pool, target).values;
  const auto want = oracle::nn_rank(oracle::to_rows(pool.matrix()), oracle::to_rows(target.matrix()));
  CHECK(got == want);

  // Ties: identical pool rows rank lower index first.
  RowMatrix same(3, 2);
  same << 1, 0, 1, 0, 0, 1;
  RowMatrix t(1, 2);
  t << 1, 0;
  CHECK(nn_rank_score(EmbeddingSet(same), EmbeddingSet(t)).values ==
        std::vector<double>{3.0, 2.0, 1.0});
}

TEST_CASE("metrics are permutation equivariant") {
  const EmbeddingSet target = unit_set(10, 5, 22);
  const EmbeddingSet pool = unit_set(25, 5, 23);
  std::vector<std::size_t> perm(25);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::reverse(perm.begin(), perm.end());
  const EmbeddingSet shuffled = gather_rows(pool, perm);
  const auto stats = target_statistics(target, target);
  const auto a = vas(pool, pool, stats).values;
  const auto b = vas(shuffled, shuffled, stats).values;
  const auto c = normsim(pool, target, NormOrder::finite(3)).values;
  const auto e = normsim(shuffled, target, NormOrder::finite(3)).values;
  for (std::size_t i = 0; i < 25; ++i) {
    CHECK(a[perm[i]] == b[i]);
    CHECK(c[perm[i]] == e[i]);
  }
}

TEST_CASE("nn_rank guard and thread invariance") {
  const EmbeddingSet wide(RowMatrix::Ones(100000, 1));
  const EmbeddingSet many(RowMatrix::Ones(10001, 1));
  CHECK(code_of([&] { nn_rank_score(wide, many); }) == ErrorCode::kTooLarge);
  const EmbeddingSet target = unit_set(300, 16, 24);
  const EmbeddingSet pool = unit_set(2500, 16, 25);
  set_thread_count(1);
  const auto v1 = vas(pool, pool, target_statistics(target, target)).values;
  const auto n1 = normsim(pool, target, NormOrder::finite(2)).values;
  const auto r1 = nn_rank_score(pool, target).values;
  set_thread_count(3);
  const auto v3 = vas(pool, pool, target_statistics(target, target)).values;
  const auto n3 = normsim(pool, target, NormOrder::finite(2)).values;
  const auto r3 = nn_rank_score(pool, target).values;
  set_thread_count(0);
  CHECK(v1 == v3);
  CHECK(n1 == n3);
  CHECK(r1 == r3);
}
