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

#include "datasel/experiments.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "datasel/error.h"
#include "datasel/linalg.h"
#include "datasel/parallel.h"
#include "datasel/random.h"
#include "datasel/select_combine.h"
#include "datasel/stats.h"
#include "datasel/theory_lab.h"

namespace datasel {
namespace {

// Streams reserved for deriving per-trial seeds from the experiment seed.
constexpr std::uint64_t kDeriveStream = 1000;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
  return random_bits(seed, kDeriveStream + purpose, index);
}

std::size_t or_default(std::size_t value, std::size_t fallback) {
  return value == 0 ? fallback : value;
}

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

std::vector<double> geometric_spectrum(std::size_t r, double ratio) {
  std::vector<double> s(r);
  double v = 1.0;
  for (std::size_t k = 0; k < r; ++k, v *= ratio) s[k] = v;
  return s;
}

Check make_check(std::string name, double value, std::string bound, bool passed) {
  return Check{std::move(name), value, std::move(bound), passed};
}

void base_manifest(ExperimentResult& result, std::size_t d, std::size_t r,
                   std::size_t n, std::size_t trials, std::uint64_t seed) {
  result.manifest["experiment"] = result.experiment;
  result.manifest["d"] = std::to_string(d);
  result.manifest["r"] = std::to_string(r);
  result.manifest["n"] = std::to_string(n);
  result.manifest["trials"] = std::to_string(trials);
  result.manifest["seed"] = std::to_string(seed);
}

void require_rank(std::size_t d, std::size_t r) {
  if (r < 1 || r > d) throw Error(ErrorCode::kInvalidParameter, "need 1 <= r <= d");
}

// lemma1: subsets of varying composition; the trained head's test loss gap
// should fall as the subset's alignment with the target covariance rises.
ExperimentResult run_lemma1(const ExperimentOptions& opt) {
  constexpr std::size_t kTestN = 4000;
  constexpr double kRho = 1.0;
  constexpr double kTestDecay = 0.8;
  const std::size_t d = or_default(opt.d, 32);
  const std::size_t r = or_default(opt.r, 8);
  const std::size_t n = or_default(opt.n, 2000);
  const std::size_t trials = or_default(opt.trials, 50);
  const std::size_t k = n / 4;
  require_rank(d, r);
  if (k < 2) throw Error(ErrorCode::kInvalidParameter, "lemma1 needs n >= 8");

  ExperimentResult result;
  result.experiment = "lemma1";
  base_manifest(result, d, r, n, trials, opt.seed);
  result.manifest["subset_size"] = std::to_string(k);
  result.manifest["rho"] = format_number(kRho);
  result.manifest["test_n"] = std::to_string(kTestN);
  result.manifest["test_spectrum_ratio"] = format_number(kTestDecay);
  result.manifest["noise_scale"] = format_number(1.0 / std::sqrt(static_cast<double>(d)));

  WorldParams train_params;
  train_params.d = d;
  train_params.r = r;
  train_params.n = n;
  train_params.seed = opt.seed;
  const SyntheticWorld train = generate_world(train_params);

  WorldParams test_params = train_params;
  test_params.n = kTestN;
  test_params.sigma_spec = geometric_spectrum(r, kTestDecay);
  test_params.seed = derive_seed(opt.seed, 0, 0);
  const SyntheticWorld test = generate_world(test_params, train.gv_star, train.gl_star);
  const Eigen::MatrixXd target = empirical_cross_cov(test.z_v, test.z_l);

  // Per-item alignment with the target, standardized.
  Eigen::VectorXd align = ((train.z_v * target).array() * train.z_l.array()).rowwise().sum();
  const double mean = align.mean();
  const double sd = std::sqrt((align.array() - mean).square().mean());
  align = (align.array() - mean) / (sd > 0.0 ? sd : 1.0);

  const std::vector<std::size_t> all = iota_indices(n);
  result.rows.resize(trials);
  parallel_for(trials, [&](std::size_t j) {
    RandomStream rng(derive_seed(opt.seed, 1, j), 0);
    const double bias = rng.uniform();
    std::vector<double> score(n);
    for (std::size_t i = 0; i < n; ++i) {
      score[i] = bias * align(static_cast<Eigen::Index>(i)) + (1.0 - bias) * rng.normal();
    }
    const std::vector<std::size_t> subset = top_k(score, all, k, true);
    const Eigen::MatrixXd sigma_s =
        empirical_cross_cov(take_rows(train.z_v, subset), take_rows(train.z_l, subset));
    const LinearHeadProduct head = closed_form_train(take_rows(train.x_v, subset),
                                                     take_rows(train.x_l, subset), kRho, r);
    const TeacherError err =
        measure_teacher_error(train.gv_star, train.gl_star, train, subset);
    ResultRow& row = result.rows[j];
    row.seed = opt.seed;
    row.n = n;
    row.d = d;
    row.r = r;
    row.subset_id = j;
    row.trace_term = (target * sigma_s).trace();
    row.test_loss_gap = test_loss_gap(head.m, test.x_v, test.x_l);
    row.test_loss_self = test_loss_self(head.m, test.x_v, test.x_l);
    row.eps_v = err.eps_v;
    row.eps_l = err.eps_l;
    row.eps_vl = err.eps_vl;
  });

  std::vector<double> trace(trials), gap(trials);
  for (std::size_t j = 0; j < trials; ++j) {
    trace[j] = *result.rows[j].trace_term;
    gap[j] = *result.rows[j].test_loss_gap;
  }
  const double rho_s = spearman(trace, gap);
  result.checks.push_back(
      make_check("spearman_trace_vs_gap", rho_s, "<= -0.9", rho_s <= -0.9));
  return result;
}

// eym: the closed-form head against random rank-r competitors, plus first-order
// stationarity of the factorized loss.
ExperimentResult run_eym(const ExperimentOptions& opt) {
  constexpr std::size_t kCompetitors = 1000;
  constexpr double kRho = 1.0;
  constexpr std::size_t kTestN = 1000;
  const std::size_t d_max = or_default(opt.d, 8);
  const std::size_t r_max = or_default(opt.r, 3);
  const std::size_t s_max = or_default(opt.n, 10);
  const std::size_t trials = or_default(opt.trials, 50);
  if (d_max < 2 || r_max < 1 || s_max < 3) {
    throw Error(ErrorCode::kInvalidParameter, "eym needs d >= 2, r >= 1, n >= 3");
  }

  ExperimentResult result;
  result.experiment = "eym";
  base_manifest(result, d_max, r_max, s_max, trials, opt.seed);
  result.manifest["competitors"] = std::to_string(kCompetitors);
  result.manifest["rho"] = format_number(kRho);
  result.manifest["test_n"] = std::to_string(kTestN);

  std::vector<std::size_t> violations(trials);
  std::vector<double> stationarity(trials);
  std::vector<double> margin(trials);
  result.rows.resize(trials);
  parallel_for(trials, [&](std::size_t t) {
    RandomStream shape(derive_seed(opt.seed, 2, t), 0);
    const std::size_t d = 2 + shape.uniform_below(d_max - 1);
    const std::size_t r = 1 + shape.uniform_below(std::min(r_max, d - 1));
    const std::size_t s_min = std::min(s_max, r + 2);
    const std::size_t s = s_min + shape.uniform_below(s_max - s_min + 1);

    WorldParams params;
    params.d = d;
    params.r = r;
    params.n = s;
    params.seed = derive_seed(opt.seed, 3, t);
    const SyntheticWorld world = generate_world(params);
    const LinearHeadProduct head = closed_form_train(world.x_v, world.x_l, kRho, r);
    const double best = evaluate_train_loss(head.m, world.x_v, world.x_l, kRho);
    const double norm = head.m.norm();

    RandomStream rng(derive_seed(opt.seed, 4, t), 0);
    const auto di = static_cast<Eigen::Index>(d);
    const auto ri = static_cast<Eigen::Index>(r);
    double closest = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < kCompetitors; ++c) {
      Eigen::MatrixXd a(di, ri), b(di, ri);
      for (Eigen::Index j = 0; j < ri; ++j) {
        for (Eigen::Index i = 0; i < di; ++i) a(i, j) = rng.normal();
        for (Eigen::Index i = 0; i < di; ++i) b(i, j) = rng.normal();
      }
      Eigen::MatrixXd m = a * b.transpose();
      m *= norm / m.norm();
      const double loss = evaluate_train_loss(m, world.x_v, world.x_l, kRho);
      closest = std::min(closest, loss - best);
      if (!(loss > best)) ++violations[t];
    }
    margin[t] = closest;

    // dL/dM = -Gamma + rho |S|/(|S|-1) M; factors G_v = U sqrt(S), G_l = V sqrt(S).
    const double sd = static_cast<double>(s);
    const Eigen::MatrixXd gamma = compute_gamma(world.x_v, world.x_l);
    const Eigen::MatrixXd grad = -gamma + kRho * sd / (sd - 1.0) * head.m;
    const Svd f = truncated_svd(head.m, r);
    const Eigen::VectorXd root = f.values.cwiseSqrt();
    const Eigen::MatrixXd gv = f.u * root.asDiagonal();
    const Eigen::MatrixXd gl = f.v * root.asDiagonal();
    const double scale = std::max(1.0, gamma.norm());
    stationarity[t] =
        std::max((grad * gl).norm(), (grad.transpose() * gv).norm()) / scale;

    WorldParams test_params = params;
    test_params.n = kTestN;
    test_params.seed = derive_seed(opt.seed, 5, t);
    const SyntheticWorld test = generate_world(test_params, world.gv_star, world.gl_star);
    const TeacherError err =
        measure_teacher_error(world.gv_star, world.gl_star, world, iota_indices(s));
    ResultRow& row = result.rows[t];
    row.seed = params.seed;
    row.n = s;
    row.d = d;
    row.r = r;
    row.subset_id = t;
    row.test_loss_gap = test_loss_gap(head.m, test.x_v, test.x_l);
    row.test_loss_self = test_loss_self(head.m, test.x_v, test.x_l);
    row.eps_v = err.eps_v;
    row.eps_l = err.eps_l;
    row.eps_vl = err.eps_vl;
  });

  const std::size_t total = std::accumulate(violations.begin(), violations.end(), std::size_t{0});
  const double worst = *std::max_element(stationarity.begin(), stationarity.end());
  result.checks.push_back(make_check("competitors_not_beaten",
                                     static_cast<double>(total), "== 0", total == 0));
  result.checks.push_back(
      make_check("max_relative_factor_gradient", worst, "<= 1e-9", worst <= 1e-9));
  result.observations.emplace_back("min_competitor_margin",
                                   *std::min_element(margin.begin(), margin.end()));
  return result;
}

// testloss: the full-gap estimator and the self-only estimator, each on its own
// test draw, converge to the same value at the m^{-1/2} sampling rate.
ExperimentResult run_testloss(const ExperimentOptions& opt) {
  constexpr double kRho = 1.0;
  static constexpr std::size_t kSizes[] = {100, 1000, 10000};
  const std::size_t d = or_default(opt.d, 16);
  const std::size_t r = or_default(opt.r, 4);
  const std::size_t n = or_default(opt.n, 2000);
  const std::size_t reps = or_default(opt.trials, 100);
  require_rank(d, r);

  ExperimentResult result;
  result.experiment = "testloss";
  base_manifest(result, d, r, n, reps, opt.seed);
  result.manifest["rho"] = format_number(kRho);
  result.manifest["test_sizes"] = "100;1000;10000";

  WorldParams params;
  params.d = d;
  params.r = r;
  params.n = n;
  params.seed = opt.seed;
  const SyntheticWorld train = generate_world(params);
  const Eigen::MatrixXd m = closed_form_train(train.x_v, train.x_l, kRho, r).m;

  const std::size_t sizes = std::size(kSizes);
  result.rows.resize(sizes * reps);
  std::vector<double> split(sizes * reps), shared(sizes * reps);
  parallel_for(sizes * reps, [&](std::size_t job) {
    const std::size_t s = job / reps;
    const std::size_t rep = job % reps;
    WorldParams test_params = params;
    test_params.n = kSizes[s];
    test_params.seed = derive_seed(opt.seed, 6, 2 * job);
    const SyntheticWorld a = generate_world(test_params, train.gv_star, train.gl_star);
    test_params.seed = derive_seed(opt.seed, 6, 2 * job + 1);
    const SyntheticWorld b = generate_world(test_params, train.gv_star, train.gl_star);
    const double gap = test_loss_gap(m, a.x_v, a.x_l);
    const double self_b = test_loss_self(m, b.x_v, b.x_l);
    const double self_a = test_loss_self(m, a.x_v, a.x_l);
    split[job] = std::abs(gap - self_b);
    shared[job] = std::abs(gap - self_a);
    ResultRow& row = result.rows[job];
    row.seed = test_params.seed;
    row.n = kSizes[s];
    row.d = d;
    row.r = r;
    row.subset_id = rep;
    row.test_loss_gap = gap;
    row.test_loss_self = self_b;
  });

  std::vector<double> log_m(sizes), log_split(sizes), log_shared(sizes);
  for (std::size_t s = 0; s < sizes; ++s) {
    double sum_split = 0.0, sum_shared = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      sum_split += split[s * reps + rep];
      sum_shared += shared[s * reps + rep];
    }
    log_m[s] = std::log(static_cast<double>(kSizes[s]));
    log_split[s] = std::log(sum_split / static_cast<double>(reps));
    log_shared[s] = std::log(sum_shared / static_cast<double>(reps));
    result.observations.emplace_back("mean_abs_diff_m" + std::to_string(kSizes[s]),
                                     sum_split / static_cast<double>(reps));
  }
  const double slope = ols_slope(log_m, log_split);
  result.checks.push_back(make_check("log_log_slope", slope, "in [-0.65, -0.35]",
                                     slope >= -0.65 && slope <= -0.35));
  result.observations.emplace_back("same_sample_slope", ols_slope(log_m, log_shared));
  return result;
}

// Test-loss gaps of heads trained on the top-k subsets chosen by the
// vision-only and the vision+language surrogates. `teacher_text` is the
// teacher's view of the language rows.
struct ArmOutcome {
  std::vector<std::size_t> subset[2];
  double gap[2] = {0.0, 0.0};
};

ArmOutcome compare_surrogates(const SyntheticWorld& pool, const Eigen::MatrixXd& teacher_text,
                              const SyntheticWorld& test, const Eigen::MatrixXd& target,
                              std::size_t k, double rho) {
  const std::size_t n = pool.n;
  const Eigen::MatrixXd h_v = pool.x_v * pool.gv_star;
  const Eigen::MatrixXd h_l = teacher_text * pool.gl_star;
  const Eigen::MatrixXd projected = h_v * target;
  std::vector<double> vision(n), joint(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    vision[i] = projected.row(ii).dot(h_v.row(ii));
    joint[i] = projected.row(ii).dot(h_l.row(ii));
  }
  const std::vector<std::size_t> all = iota_indices(n);
  ArmOutcome out;
  for (std::size_t arm = 0; arm < 2; ++arm) {
    out.subset[arm] = top_k(arm == 0 ? vision : joint, all, k, true);
    const Eigen::MatrixXd m = closed_form_train(take_rows(pool.x_v, out.subset[arm]),
                                                take_rows(pool.x_l, out.subset[arm]), rho,
                                                pool.r)
                                  .m;
    out.gap[arm] = test_loss_gap(m, test.x_v, test.x_l);
  }
  return out;
}

// theorem-main: vision-only versus vision+language teacher surrogates for
// selection, under low and high latent misalignment. The gated trials put the
// extra language noise in the pool data; a second set puts it only in the
// teacher's view of the text and is reported as observations.
ExperimentResult run_theorem_main(const ExperimentOptions& opt) {
  constexpr double kRho = 1.0;
  constexpr double kNoise = 0.02;
  constexpr double kLanguageNoiseFactor = 10.0;
  constexpr double kEtaLow = 0.1;
  constexpr double kEtaHigh = 2.0;
  constexpr double kTestDecay = 0.5;
  constexpr std::size_t kTestN = 2000;
  const std::size_t d = or_default(opt.d, 16);
  const std::size_t r = or_default(opt.r, 4);
  const std::size_t n = or_default(opt.n, 2000);
  const std::size_t trials = or_default(opt.trials, 50);
  const std::size_t k = n / 4;
  require_rank(d, r);
  if (k < 2) throw Error(ErrorCode::kInvalidParameter, "theorem-main needs n >= 8");

  ExperimentResult result;
  result.experiment = "theorem-main";
  base_manifest(result, d, r, n, trials, opt.seed);
  result.manifest["subset_size"] = std::to_string(k);
  result.manifest["rho"] = format_number(kRho);
  result.manifest["noise_scale"] = format_number(kNoise);
  result.manifest["language_noise_scale"] = format_number(kNoise * kLanguageNoiseFactor);
  result.manifest["eta_low"] = format_number(kEtaLow);
  result.manifest["eta_high"] = format_number(kEtaHigh);
  result.manifest["test_n"] = std::to_string(kTestN);
  result.manifest["test_spectrum_ratio"] = format_number(kTestDecay);
  result.manifest["subset_id"] = "4*trial+arm;arm=0 low-eta vision,1 low-eta vision+language,"
                                 "2 high-eta vision,3 high-eta vision+language";

  result.rows.resize(4 * trials);
  std::vector<int> vision_wins(2 * trials), teacher_vision_wins(2 * trials);
  parallel_for(2 * trials, [&](std::size_t job) {
    const std::size_t t = job / 2;
    const std::size_t regime = job % 2;
    WorldParams params;
    params.d = d;
    params.r = r;
    params.n = n;
    params.noise_scale = kNoise;
    params.language_noise_scale = kNoise * kLanguageNoiseFactor;
    params.eta = regime == 0 ? kEtaLow : kEtaHigh;
    params.seed = derive_seed(opt.seed, 7, job);
    const SyntheticWorld pool = generate_world(params);

    WorldParams test_params = params;
    test_params.n = kTestN;
    test_params.eta = 0.0;
    test_params.sigma_spec = geometric_spectrum(r, kTestDecay);
    test_params.seed = derive_seed(opt.seed, 8, job);
    const SyntheticWorld test = generate_world(test_params, pool.gv_star, pool.gl_star);
    const Eigen::MatrixXd target = empirical_cross_cov(test.z_v, test.z_l);

    const ArmOutcome data = compare_surrogates(pool, pool.x_l, test, target, k, kRho);
    vision_wins[job] = data.gap[0] < data.gap[1] ? 1 : 0;
    for (std::size_t arm = 0; arm < 2; ++arm) {
      const std::vector<std::size_t>& subset = data.subset[arm];
      const Eigen::MatrixXd m = closed_form_train(take_rows(pool.x_v, subset),
                                                  take_rows(pool.x_l, subset), kRho, r)
                                    .m;
      const Eigen::MatrixXd sigma_s =
          empirical_cross_cov(take_rows(pool.z_v, subset), take_rows(pool.z_l, subset));
      const TeacherError err = measure_teacher_error(pool.gv_star, pool.gl_star, pool, subset);
      ResultRow& row = result.rows[4 * t + 2 * regime + arm];
      row.seed = params.seed;
      row.n = n;
      row.d = d;
      row.r = r;
      row.subset_id = 4 * t + 2 * regime + arm;
      row.trace_term = (target * sigma_s).trace();
      row.test_loss_gap = data.gap[arm];
      row.test_loss_self = test_loss_self(m, test.x_v, test.x_l);
      row.eps_v = err.eps_v;
      row.eps_l = err.eps_l;
      row.eps_vl = err.eps_vl;
    }

    // Same trial with clean language data and a noisy teacher view of it.
    WorldParams clean = params;
    clean.language_noise_scale = kNoise;
    const SyntheticWorld clean_pool = generate_world(clean);
    Eigen::MatrixXd view = clean_pool.x_l;
    RandomStream rng(derive_seed(opt.seed, 10, job), 0);
    for (Eigen::Index i = 0; i < view.rows(); ++i) {
      for (Eigen::Index j = 0; j < view.cols(); ++j) {
        view(i, j) += kNoise * kLanguageNoiseFactor * rng.normal();
      }
    }
    const ArmOutcome teacher = compare_surrogates(clean_pool, view, test, target, k, kRho);
    teacher_vision_wins[job] = teacher.gap[0] < teacher.gap[1] ? 1 : 0;
  });

  std::size_t low = 0, high = 0, teacher_low = 0, teacher_high = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    low += static_cast<std::size_t>(vision_wins[2 * t]);
    high += static_cast<std::size_t>(vision_wins[2 * t + 1]);
    teacher_low += static_cast<std::size_t>(teacher_vision_wins[2 * t]);
    teacher_high += static_cast<std::size_t>(teacher_vision_wins[2 * t + 1]);
  }
  const double need = std::ceil(0.9 * static_cast<double>(trials));
  const double low_wins = static_cast<double>(low);
  const double high_losses = static_cast<double>(trials - high);
  result.checks.push_back(make_check("low_eta_vision_wins", low_wins,
                                     ">= " + format_number(need), low_wins >= need));
  result.checks.push_back(make_check("high_eta_joint_wins", high_losses,
                                     "> " + format_number(0.5 * static_cast<double>(trials)),
                                     2 * (trials - high) > trials));
  result.observations.emplace_back("teacher_noise_low_eta_vision_wins",
                                   static_cast<double>(teacher_low));
  result.observations.emplace_back("teacher_noise_high_eta_joint_wins",
                                   static_cast<double>(trials - teacher_high));
  return result;
}

// noise-decomp: Gamma splits into signal plus four noise terms; the noise terms'
// Monte-Carlo means are compared with zero over fresh subsets of one world.
ExperimentResult run_noise_decomp(const ExperimentOptions& opt) {
  const std::size_t d = or_default(opt.d, 4);
  const std::size_t r = or_default(opt.r, 2);
  const std::size_t s = or_default(opt.n, 50);
  const std::size_t reps = or_default(opt.trials, 200);
  require_rank(d, r);
  if (s < 2) throw Error(ErrorCode::kSubsetTooSmall, "need |S| >= 2");
  if (reps < 2) throw Error(ErrorCode::kInvalidParameter, "need at least 2 trials");

  ExperimentResult result;
  result.experiment = "noise-decomp";
  base_manifest(result, d, r, s, reps, opt.seed);

  WorldParams params;
  params.d = d;
  params.r = r;
  params.n = s;
  params.seed = opt.seed;
  const SyntheticWorld base = generate_world(params);
  result.manifest["noise_scale"] = format_number(base.noise_v);

  const std::vector<std::size_t> subset = iota_indices(s);
  std::vector<std::array<Eigen::MatrixXd, 5>> parts(reps);
  std::vector<double> identity(reps);
  result.rows.resize(reps);
  parallel_for(reps, [&](std::size_t j) {
    WorldParams p = params;
    p.seed = derive_seed(opt.seed, 9, j);
    const SyntheticWorld world = generate_world(p, base.gv_star, base.gl_star);
    parts[j] = decompose_gamma_noise(world, subset);
    Eigen::MatrixXd sum = parts[j][0];
    for (std::size_t i = 1; i < 5; ++i) sum += parts[j][i];
    identity[j] = (sum - compute_gamma(world.x_v, world.x_l)).cwiseAbs().maxCoeff();
    const TeacherError err = measure_teacher_error(base.gv_star, base.gl_star, world, subset);
    ResultRow& row = result.rows[j];
    row.seed = p.seed;
    row.n = s;
    row.d = d;
    row.r = r;
    row.subset_id = j;
    row.trace_term = empirical_cross_cov(world.z_v, world.z_l).trace();
    row.eps_v = err.eps_v;
    row.eps_l = err.eps_l;
    row.eps_vl = err.eps_vl;
  });

  const double worst_identity = *std::max_element(identity.begin(), identity.end());
  result.checks.push_back(make_check("sum_equals_gamma", worst_identity, "<= 1e-10",
                                     worst_identity <= 1e-10));

  // P4 carries a bias of -E[x_v x_l^T]/(|S|-1); here z_v = z_l is uniform on
  // the sphere, so E[z_v z_l^T] = I/r.
  const double count = static_cast<double>(reps);
  const double sd_s = static_cast<double>(s);
  const auto di = static_cast<Eigen::Index>(d);
  for (std::size_t i = 1; i < 5; ++i) {
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(di, di);
    for (const auto& p : parts) mean += p[i];
    mean /= count;
    Eigen::MatrixXd var = Eigen::MatrixXd::Zero(di, di);
    for (const auto& p : parts) var += (p[i] - mean).cwiseAbs2();
    const Eigen::MatrixXd se = (var / (count - 1.0) / count).cwiseSqrt();
    const double z = (mean.cwiseAbs().array() / se.array()).maxCoeff();
    result.checks.push_back(make_check("P" + std::to_string(i) + "_max_abs_z", z,
                                       "<= 3", z <= 3.0));
    if (i == 4) {
      const Eigen::MatrixXd bias = -base.gv_star * base.gl_star.transpose() /
                                   (static_cast<double>(r) * (sd_s - 1.0));
      const double zb = ((mean - bias).cwiseAbs().array() / se.array()).maxCoeff();
      result.observations.emplace_back("P4_max_abs_z_about_predicted_bias", zb);
    }
  }
  return result;
}

}  // namespace

bool ExperimentResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"lemma1", "eym", "testloss",
                                                 "theorem-main", "noise-decomp"};
  return names;
}

ExperimentResult run_experiment(std::string_view name, const ExperimentOptions& options) {
  if (name == "lemma1") return run_lemma1(options);
  if (name == "eym") return run_eym(options);
  if (name == "testloss") return run_testloss(options);
  if (name == "theorem-main") return run_theorem_main(options);
  if (name == "noise-decomp") return run_noise_decomp(options);
  throw Error(ErrorCode::kInvalidParameter, "unknown experiment '" + std::string(name) + "'");
}

namespace {

std::string field(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

}  // namespace

void write_experiment_csv(const ExperimentResult& result,
                          const std::filesystem::path& path) {
  std::string out;
  for (const auto& [key, value] : result.manifest) out += "# " + key + "=" + value + "\n";
  for (const Check& c : result.checks) {
    out += "# check." + c.name + "=" + format_number(c.value) + " " + c.bound + " " +
           (c.passed ? "pass" : "fail") + "\n";
  }
  for (const auto& [key, value] : result.observations) {
    out += "# observed." + key + "=" + format_number(value) + "\n";
  }
  out += "seed,n,d,r,subset_id,trace_term,test_loss_gap,test_loss_self,eps_v,eps_l,eps_vl\n";
  for (const ResultRow& row : result.rows) {
    out += std::to_string(row.seed) + "," + std::to_string(row.n) + "," +
           std::to_string(row.d) + "," + std::to_string(row.r) + "," +
           std::to_string(row.subset_id) + "," + field(row.trace_term) + "," +
           field(row.test_loss_gap) + "," + field(row.test_loss_self) + "," +
           field(row.eps_v) + "," + field(row.eps_l) + "," + field(row.eps_vl) + "\n";
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace datasel
