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

// Synthetic linear model of paired vision/language data.
//
// Each pair is generated from unit latent vectors through orthonormal maps,
//
//   x_v = G_v z_v + xi_v,   x_l = G_l z_l + xi_l,   G in R^{d x r},
//
// with latents w ~ N(0, I_r), z_v = w / |w|, z_l = normalize(D w + eta u)
// (u ~ N(0, I_r)) and Gaussian noise xi. A linear head is scored as
// s(x_v, x_l) = x_v^T M x_l with M = G_v' G_l'^T of rank <= r, and trained
// in closed form from
//
//   Gamma = 1/(|S|-1) sum x_v x_l^T - |S|/(|S|-1) mean(x_v) mean(x_l)^T
//   M     = (1/rho) ((|S|-1)/|S|) SVD_r(Gamma).
//
// Matrices of samples are row-per-sample throughout.

#ifndef DATASEL_THEORY_LAB_H_
#define DATASEL_THEORY_LAB_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "datasel/selection.h"

namespace datasel {

struct WorldParams {
  std::size_t d = 16;
  std::size_t r = 4;
  std::size_t n = 1000;
  // Diagonal D applied to the language latent; empty means all ones. Must be
  // nonnegative and nonincreasing.
  std::vector<double> sigma_spec;
  // Per-coordinate noise standard deviation; negative selects 1/sqrt(d).
  double noise_scale = -1.0;
  // Language noise scale; negative reuses noise_scale.
  double language_noise_scale = -1.0;
  double eta = 0.0;
  std::uint64_t seed = 0;
};

struct SyntheticWorld {
  std::size_t d = 0;
  std::size_t r = 0;
  std::size_t n = 0;
  Eigen::MatrixXd gv_star;  // d x r
  Eigen::MatrixXd gl_star;  // d x r
  Eigen::VectorXd sigma_train;
  Eigen::MatrixXd z_v, z_l;    // n x r
  Eigen::MatrixXd xi_v, xi_l;  // n x d
  Eigen::MatrixXd x_v, x_l;    // n x d
  double noise_v = 0.0;
  double noise_l = 0.0;
  double eta = 0.0;
  std::uint64_t seed = 0;
};

// Fresh orthonormal maps drawn from the seed.
SyntheticWorld generate_world(const WorldParams& params);

// Same generation with the given maps (e.g. test data sharing the ground-truth
// representation of a training world but not its latent law).
SyntheticWorld generate_world(const WorldParams& params, const Eigen::MatrixXd& gv_star,
                              const Eigen::MatrixXd& gl_star);

// Rows of a matrix at the given indices.
Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> rows);

Eigen::MatrixXd compute_gamma(const Eigen::MatrixXd& x_v, const Eigen::MatrixXd& x_l);

struct LinearHeadProduct {
  Eigen::MatrixXd m;  // d x d
  double rho = 1.0;
  std::size_t r = 0;
};

LinearHeadProduct closed_form_train(const Eigen::MatrixXd& x_v,
                                    const Eigen::MatrixXd& x_l, double rho,
                                    std::size_t r);

// Regularized training loss; may be negative.
double evaluate_train_loss(const Eigen::MatrixXd& m, const Eigen::MatrixXd& x_v,
                           const Eigen::MatrixXd& x_l, double rho);

// Mean cross-pair score minus mean self-pair score.
double test_loss_gap(const Eigen::MatrixXd& m, const Eigen::MatrixXd& x_v,
                     const Eigen::MatrixXd& x_l);

// Minus the mean self-pair score.
double test_loss_self(const Eigen::MatrixXd& m, const Eigen::MatrixXd& x_v,
                      const Eigen::MatrixXd& x_l);

// (1/|S|) sum a_i b_i^T.
Eigen::MatrixXd empirical_cross_cov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Tr(target (a - b)).
double vas_gap(const Eigen::MatrixXd& target, const Eigen::MatrixXd& a,
               const Eigen::MatrixXd& b);

inline constexpr std::size_t kBruteForceMaxN = 20;

// Size-k subset maximizing Tr(target * (1/k) sum_{i in S} a_i b_i^T) by
// enumeration; ties go to the lexicographically smallest index set.
Selection brute_force_best_subset(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                  std::size_t k, const Eigen::MatrixXd& target);

struct TeacherError {
  double eps_v = 0.0;
  double eps_l = 0.0;
  double eps_vl = 0.0;
};

// Nuclear-norm gap between teacher-recovered and true latent second moments
// over `subset`, per modality and across modalities.
TeacherError measure_teacher_error(const Eigen::MatrixXd& teacher_v,
                                   const Eigen::MatrixXd& teacher_l,
                                   const SyntheticWorld& world,
                                   std::span<const std::size_t> subset);

// Mean over ordered class pairs (c, c'), c != c', of the fraction of class-c
// samples whose score against template c beats template c'. class_samples[c]
// holds vision rows; templates holds one language row per class.
double classification_accuracy(const Eigen::MatrixXd& m,
                               std::span<const Eigen::MatrixXd> class_samples,
                               const Eigen::MatrixXd& templates);

// Gamma split as signal P0 plus noise P1..P4 over `subset`.
std::array<Eigen::MatrixXd, 5> decompose_gamma_noise(const SyntheticWorld& world,
                                                     std::span<const std::size_t> subset);

}  // namespace datasel

#endif  // DATASEL_THEORY_LAB_H_
