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

#include "datasel/linalg.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "datasel/error.h"

namespace datasel {
namespace {

constexpr double kOrthTol = 1e-15;

// Columns of `basis` beyond `filled` replaced by unit vectors orthogonal to
// all earlier columns (Gram-Schmidt over the standard basis, applied twice).
void complete_orthonormal(Eigen::MatrixXd& basis, Eigen::Index filled) {
  const Eigen::Index rows = basis.rows();
  Eigen::Index next_axis = 0;
  for (Eigen::Index c = filled; c < basis.cols(); ++c) {
    while (true) {
      if (next_axis >= rows) {
        throw Error(ErrorCode::kConvergenceFailure,
                    "cannot complete orthonormal basis");
      }
      Eigen::VectorXd e = Eigen::VectorXd::Unit(rows, next_axis++);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index k = 0; k < c; ++k) {
          e -= basis.col(k).dot(e) * basis.col(k);
        }
      }
      const double norm = e.norm();
      if (norm > 0.5) {
        basis.col(c) = e / norm;
        break;
      }
    }
  }
}

// Full thin SVD of a tall (rows >= cols) matrix.
Svd jacobi_tall(const Eigen::MatrixXd& a) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  Eigen::MatrixXd w = a;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  bool converged = n < 2;
  for (int sweep = 0; sweep < kSvdMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = w.col(p).squaredNorm();
        const double beta = w.col(q).squaredNorm();
        const double gamma = w.col(p).dot(w.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= kOrthTol * std::sqrt(alpha * beta)) {
          continue;
        }
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index k = 0; k < m; ++k) {
          const double wp = w(k, p);
          w(k, p) = c * wp - s * w(k, q);
          w(k, q) = s * wp + c * w(k, q);
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vp = v(k, p);
          v(k, p) = c * vp - s * v(k, q);
          v(k, q) = s * vp + c * v(k, q);
        }
      }
    }
  }
  if (!converged) {
    throw Error(ErrorCode::kConvergenceFailure,
                "Jacobi SVD did not converge in " + std::to_string(kSvdMaxSweeps) +
                    " sweeps");
  }

  Eigen::VectorXd norms(n);
  for (Eigen::Index j = 0; j < n; ++j) norms(j) = w.col(j).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return norms(x) > norms(y);
  });

  Svd out;
  out.u.resize(m, n);
  out.values.resize(n);
  out.v.resize(n, n);
  const double tiny = std::numeric_limits<double>::epsilon() *
                      std::max<double>(static_cast<double>(m), 1.0) *
                      (norms.size() ? norms.maxCoeff() : 0.0);
  Eigen::Index nonzero = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index j = order[static_cast<std::size_t>(k)];
    out.values(k) = norms(j);
    out.v.col(k) = v.col(j);
    if (norms(j) > tiny && norms(j) > 0.0) {
      out.u.col(k) = w.col(j) / norms(j);
      ++nonzero;
    }
  }
  complete_orthonormal(out.u, nonzero);
  return out;
}

}  // namespace

Svd truncated_svd(const Eigen::MatrixXd& a, std::size_t r) {
  const auto rows = static_cast<std::size_t>(a.rows());
  const auto cols = static_cast<std::size_t>(a.cols());
  if (r > std::min(rows, cols)) {
    throw Error(ErrorCode::kInvalidParameter,
                "rank " + std::to_string(r) + " exceeds min(" +
                    std::to_string(rows) + ", " + std::to_string(cols) + ")");
  }
  if (!a.allFinite()) {
    throw Error(ErrorCode::kNonFiniteValue, "matrix has NaN or Inf entries");
  }

  Svd full;
  if (rows >= cols) {
    full = jacobi_tall(a);
  } else {
    Svd t = jacobi_tall(a.transpose());
    full.u = std::move(t.v);
    full.values = std::move(t.values);
    full.v = std::move(t.u);
  }
  const auto k = static_cast<Eigen::Index>(r);
  Svd out;
  out.u = full.u.leftCols(k);
  out.values = full.values.head(k);
  out.v = full.v.leftCols(k);
  return out;
}

double nuclear_norm(const Eigen::MatrixXd& a) {
  const std::size_t r = static_cast<std::size_t>(std::min(a.rows(), a.cols()));
  return truncated_svd(a, r).values.sum();
}

}  // namespace datasel
