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

#ifndef DATASEL_LINALG_H_
#define DATASEL_LINALG_H_

#include <cstddef>

#include <Eigen/Dense>

namespace datasel {

// Sweep cap for the Jacobi iteration; exceeding it raises ConvergenceFailure.
inline constexpr int kSvdMaxSweeps = 100;

struct Svd {
  Eigen::MatrixXd u;       // rows x r, orthonormal columns
  Eigen::VectorXd values;  // r singular values, descending
  Eigen::MatrixXd v;       // cols x r, orthonormal columns

  Eigen::MatrixXd reconstruct() const {
    return u * values.asDiagonal() * v.transpose();
  }
};

// Top-r singular triplets by one-sided (Hestenes) Jacobi. u v^T weighted by
// the values is the best rank-r approximation in Frobenius norm. Left vectors
// for zero singular values are completed to an orthonormal set.
Svd truncated_svd(const Eigen::MatrixXd& a, std::size_t r);

// Sum of all singular values.
double nuclear_norm(const Eigen::MatrixXd& a);

}  // namespace datasel

#endif  // DATASEL_LINALG_H_
