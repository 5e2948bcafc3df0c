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

#include "datasel/theory_lab.h"

#include <cmath>
#include <string>

#include "datasel/error.h"
#include "datasel/linalg.h"
#include "datasel/random.h"

namespace datasel {
namespace {

// Stream ids within one seed.
enum Stream : std::uint64_t {
  kStreamMapV = 0,
  kStreamMapL = 1,
  kStreamLatent = 2,
  kStreamMisalign = 3,
  kStreamNoiseV = 4,
  kStreamNoiseL = 5,
};

Eigen::MatrixXd orthonormal_map(std::size_t d, std::size_t r, RandomStream rng) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(r));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
}

void require_pairs(const Eigen::MatrixXd& x_v, const Eigen::MatrixXd& x_l,
                   Eigen::Index min_rows, ErrorCode code) {
  if (x_v.rows() != x_l.rows() || x_v.cols() != x_l.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "vision and language rows differ in shape");
  }
  if (x_v.rows() < min_rows) {
    throw Error(code, "need at least " + std::to_string(min_rows) + " pairs, got " +
                          std::to_string(x_v.rows()));
  }
}

// Per-row self scores x_v_i^T M x_l_i.
Eigen::VectorXd self_scores(const Eigen::MatrixXd& m, const Eigen::MatrixXd& x_v,
                            const Eigen::MatrixXd& x_l) {
  return ((x_v * m).array() * x_l.array()).rowwise().sum();
}

}  // namespace

SyntheticWorld generate_world(const WorldParams& params) {
  if (params.r < 1 || params.r > params.d) {
    throw Error(ErrorCode::kInvalidParameter, "need 1 <= r <= d");
  }
  return generate_world(params,
                        orthonormal_map(params.d, params.r,
                                        RandomStream(params.seed, kStreamMapV)),
                        orthonormal_map(params.d, params.r,
                                        RandomStream(params.seed, kStreamMapL)));
}

SyntheticWorld generate_world(const WorldParams& params, const Eigen::MatrixXd& gv_star,
                              const Eigen::MatrixXd& gl_star) {
  const std::size_t d = params.d;
  const std::size_t r = params.r;
  if (r < 1 || r > d) throw Error(ErrorCode::kInvalidParameter, "need 1 <= r <= d");
  if (params.n < 2) throw Error(ErrorCode::kInvalidParameter, "need n >= 2");
  if (params.eta < 0.0 || !std::isfinite(params.eta)) {
    throw Error(ErrorCode::kInvalidParameter, "eta must be >= 0");
  }
  const auto di = static_cast<Eigen::Index>(d);
  const auto ri = static_cast<Eigen::Index>(r);
  if (gv_star.rows() != di || gv_star.cols() != ri || gl_star.rows() != di ||
      gl_star.cols() != ri) {
    throw Error(ErrorCode::kShapeMismatch, "maps must be d x r");
  }

  SyntheticWorld w;
  w.d = d;
  w.r = r;
  w.n = params.n;
  w.gv_star = gv_star;
  w.gl_star = gl_star;
  w.sigma_train = Eigen::VectorXd::Ones(ri);
  if (!params.sigma_spec.empty()) {
    if (params.sigma_spec.size() != r) {
      throw Error(ErrorCode::kInvalidParameter, "sigma_spec needs r entries");
    }
    for (std::size_t k = 0; k < r; ++k) {
      const double s = params.sigma_spec[k];
      if (!(s >= 0.0) || !std::isfinite(s) || (k > 0 && s > params.sigma_spec[k - 1])) {
        throw Error(ErrorCode::kInvalidParameter,
                    "sigma_spec must be nonnegative and nonincreasing");
      }
      w.sigma_train(static_cast<Eigen::Index>(k)) = s;
    }
  }
  w.noise_v = params.noise_scale < 0.0 ? 1.0 / std::sqrt(static_cast<double>(d))
                                       : params.noise_scale;
  w.noise_l = params.language_noise_scale < 0.0 ? w.noise_v : params.language_noise_scale;
  if (!std::isfinite(w.noise_v) || !std::isfinite(w.noise_l)) {
    throw Error(ErrorCode::kInvalidParameter, "noise scales must be finite");
  }
  w.eta = params.eta;
  w.seed = params.seed;

  const auto n = static_cast<Eigen::Index>(params.n);
  RandomStream latent(params.seed, kStreamLatent);
  RandomStream misalign(params.seed, kStreamMisalign);
  w.z_v.resize(n, ri);
  w.z_l.resize(n, ri);
  Eigen::VectorXd draw(ri);
  Eigen::VectorXd extra(ri);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < ri; ++k) draw(k) = latent.normal();
    for (Eigen::Index k = 0; k < ri; ++k) extra(k) = misalign.normal();
    const double wn = draw.norm();
    Eigen::VectorXd zl = w.sigma_train.cwiseProduct(draw) + params.eta * extra;
    const double ln = zl.norm();
    w.z_v.row(i) = wn > 0.0 ? Eigen::VectorXd(draw / wn) : Eigen::VectorXd::Unit(ri, 0);
    w.z_l.row(i) = ln > 0.0 ? Eigen::VectorXd(zl / ln) : Eigen::VectorXd(w.z_v.row(i).transpose());
  }

  RandomStream noise_v(params.seed, kStreamNoiseV);
  RandomStream noise_l(params.seed, kStreamNoiseL);
  w.xi_v.resize(n, di);
  w.xi_l.resize(n, di);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < di; ++k) w.xi_v(i, k) = w.noise_v * noise_v.normal();
    for (Eigen::Index k = 0; k < di; ++k) w.xi_l(i, k) = w.noise_l * noise_l.normal();
  }
  w.x_v = w.z_v * gv_star.transpose() + w.xi_v;
  w.x_l = w.z_l * gl_star.transpose() + w.xi_l;
  return w;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= static_cast<std::size_t>(m.rows())) {
      throw Error(ErrorCode::kIndexOutOfRange, "row " + std::to_string(rows[k]));
    }
    out.row(static_cast<Eigen::Index>(k)) = m.row(static_cast<Eigen::Index>(rows[k]));
  }
  return out;
}

Eigen::MatrixXd compute_gamma(const Eigen::MatrixXd& x_v, const Eigen::MatrixXd& x_l) {
  require_pairs(x_v, x_l, 2, ErrorCode::kSubsetTooSmall);
  const double s = static_cast<double>(x_v.rows());
  const Eigen::VectorXd mean_v = x_v.colwise().mean();
  const Eigen::VectorXd mean_l = x_l.colwise().mean();
  return (x_v.transpose() * x_l) / (s - 1.0) -
         (s / (s - 1.0)) * (mean_v * mean_l.transpose());
}

LinearHeadProduct closed_form_train(const Eigen::MatrixXd& x_v,
                                    const Eigen::MatrixXd& x_l, double rho,
                                    std::size_t r) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw Error(ErrorCode::kInvalidParameter, "rho must be positive");
  }
  const Eigen::MatrixXd gamma = compute_gamma(x_v, x_l);
  const double s = static_cast<double>(x_v.rows());
  LinearHeadProduct head;
  head.rho = rho;
  head.r = r;
  head.m = ((s - 1.0) / (s * rho)) * truncated_svd(gamma, r).reconstruct();
  return head;
}

double evaluate_train_loss(const Eigen::MatrixXd& m, const Eigen::MatrixXd& x_v,
                           const Eigen::MatrixXd& x_l, double rho) {
  require_pairs(x_v, x_l, 2, ErrorCode::kSubsetTooSmall);
  const double s = static_cast<double>(x_v.rows());
  // sum_ij s_ij = (sum x_v)^T M (sum x_l); sum_ij s_ii = |S| sum_i s_ii.
  const Eigen::VectorXd sum_v = x_v.colwise().sum();
  const Eigen::VectorXd sum_l = x_l.colwise().sum();
  const double cross = sum_v.dot(m * sum_l);
  const double self = self_scores(m, x_v, x_l).sum();
  return (cross - s * self) / (s * (s - 1.0)) +
         0.5 * rho * (s / (s - 1.0)) * m.squaredNorm();
}

double test_loss_gap(const Eigen::MatrixXd& m, const Eigen::MatrixXd& x_v,
                     const Eigen::MatrixXd& x_l) {
  require_pairs(x_v, x_l, 2, ErrorCode::kTooFewSamples);
  const Eigen::VectorXd mean_v = x_v.colwise().mean();
  const Eigen::VectorXd mean_l = x_l.colwise().mean();
  return mean_v.dot(m * mean_l) - self_scores(m, x_v, x_l).mean();
}

double test_loss_self(const Eigen::MatrixXd& m, const Eigen::MatrixXd& x_v,
                      const Eigen::MatrixXd& x_l) {
  require_pairs(x_v, x_l, 1, ErrorCode::kTooFewSamples);
  return -self_scores(m, x_v, x_l).mean();
}

Eigen::MatrixXd empirical_cross_cov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "row counts differ");
  }
  if (a.rows() == 0) throw Error(ErrorCode::kSubsetTooSmall, "empty subset");
  return (a.transpose() * b) / static_cast<double>(a.rows());
}

double vas_gap(const Eigen::MatrixXd& target, const Eigen::MatrixXd& a,
               const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || target.cols() != a.rows() ||
      target.rows() != a.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "vas_gap needs conformable matrices");
  }
  return (target * (a - b)).trace();
}

Selection brute_force_best_subset(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                  std::size_t k, const Eigen::MatrixXd& target) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  if (a.rows() != b.rows() || a.cols() != b.cols() || target.rows() != a.cols() ||
      target.cols() != b.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "brute force inputs are not conformable");
  }
  if (n > kBruteForceMaxN) {
    throw Error(ErrorCode::kTooLarge, "enumeration limited to n <= 20");
  }
  if (k < 1 || k > n) throw Error(ErrorCode::kInvalidParameter, "need 1 <= k <= n");

  // Tr(T a_i b_i^T) = a_i^T T b_i.
  std::vector<double> gain(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    gain[i] = a.row(ii).dot(target * b.row(ii).transpose());
  }

  std::vector<std::size_t> combo(k);
  for (std::size_t j = 0; j < k; ++j) combo[j] = j;
  std::vector<std::size_t> best = combo;
  double best_value = -std::numeric_limits<double>::infinity();
  while (true) {
    double value = 0.0;
    for (std::size_t i : combo) value += gain[i];
    value /= static_cast<double>(k);
    if (value > best_value) {
      best_value = value;
      best = combo;
    }
    // Next combination in lexicographic order.
    std::size_t j = k;
    while (j > 0 && combo[j - 1] == n - k + (j - 1)) --j;
    if (j == 0) break;
    ++combo[j - 1];
    for (std::size_t t = j; t < k; ++t) combo[t] = combo[t - 1] + 1;
  }
  return Selection(n, std::move(best));
}

TeacherError measure_teacher_error(const Eigen::MatrixXd& teacher_v,
                                   const Eigen::MatrixXd& teacher_l,
                                   const SyntheticWorld& world,
                                   std::span<const std::size_t> subset) {
  if (subset.empty()) throw Error(ErrorCode::kSubsetTooSmall, "empty subset");
  const Eigen::MatrixXd rec_v = take_rows(world.x_v, subset) * teacher_v;  // |S| x r
  const Eigen::MatrixXd rec_l = take_rows(world.x_l, subset) * teacher_l;
  const Eigen::MatrixXd z_v = take_rows(world.z_v, subset);
  const Eigen::MatrixXd z_l = take_rows(world.z_l, subset);
  const double s = static_cast<double>(subset.size());
  TeacherError e;
  e.eps_v = nuclear_norm(rec_v.transpose() * rec_v - z_v.transpose() * z_v) / s;
  e.eps_l = nuclear_norm(rec_l.transpose() * rec_l - z_l.transpose() * z_l) / s;
  e.eps_vl = nuclear_norm(rec_v.transpose() * rec_l - z_v.transpose() * z_l) / s;
  return e;
}

double classification_accuracy(const Eigen::MatrixXd& m,
                               std::span<const Eigen::MatrixXd> class_samples,
                               const Eigen::MatrixXd& templates) {
  const std::size_t classes = class_samples.size();
  if (classes < 2) throw Error(ErrorCode::kTooFewClasses, "need at least 2 classes");
  if (static_cast<std::size_t>(templates.rows()) != classes) {
    throw Error(ErrorCode::kShapeMismatch, "one template row per class expected");
  }
  double total = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    const Eigen::MatrixXd& xs = class_samples[c];
    if (xs.rows() == 0) {
      throw Error(ErrorCode::kTooFewSamples, "class " + std::to_string(c) + " is empty");
    }
    // scores(i, c') = x_i^T M template_c'
    const Eigen::MatrixXd scores = xs * m * templates.transpose();
    for (std::size_t other = 0; other < classes; ++other) {
      if (other == c) continue;
      std::size_t wins = 0;
      for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        if (scores(i, static_cast<Eigen::Index>(c)) >
            scores(i, static_cast<Eigen::Index>(other))) {
          ++wins;
        }
      }
      total += static_cast<double>(wins) / static_cast<double>(scores.rows());
    }
  }
  return total / static_cast<double>(classes * (classes - 1));
}

std::array<Eigen::MatrixXd, 5> decompose_gamma_noise(const SyntheticWorld& world,
                                                     std::span<const std::size_t> subset) {
  if (subset.size() < 2) throw Error(ErrorCode::kSubsetTooSmall, "need |S| >= 2");
  const double s = static_cast<double>(subset.size());
  const Eigen::MatrixXd z_v = take_rows(world.z_v, subset);
  const Eigen::MatrixXd z_l = take_rows(world.z_l, subset);
  const Eigen::MatrixXd xi_v = take_rows(world.xi_v, subset);
  const Eigen::MatrixXd xi_l = take_rows(world.xi_l, subset);
  const Eigen::VectorXd mean_v = take_rows(world.x_v, subset).colwise().mean();
  const Eigen::VectorXd mean_l = take_rows(world.x_l, subset).colwise().mean();
  const Eigen::MatrixXd sigma_s = z_v.transpose() * z_l / s;

  std::array<Eigen::MatrixXd, 5> p;
  p[0] = (s / (s - 1.0)) * world.gv_star * sigma_s * world.gl_star.transpose();
  p[1] = world.gv_star * (z_v.transpose() * xi_l) / (s - 1.0);
  p[2] = (xi_v.transpose() * z_l) * world.gl_star.transpose() / (s - 1.0);
  p[3] = xi_v.transpose() * xi_l / (s - 1.0);
  p[4] = -(s / (s - 1.0)) * (mean_v * mean_l.transpose());
  return p;
}

}  // namespace datasel
