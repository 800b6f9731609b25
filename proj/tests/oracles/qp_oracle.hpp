// Copyright 2026 The Metakernel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Reference solver for the soft-margin SVM dual, used only to check SMO.
// Accelerated projected gradient (FISTA with restarts) on
//   min 1/2 a^T Q a - 1^T a  s.t. 0 <= a_i <= C, y^T a = 0,
// with the projection computed by bisection on the equality multiplier.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace metakernel::testing {

inline Eigen::VectorXd project_box_hyperplane(const Eigen::VectorXd& v, const Eigen::VectorXd& y, double c) {
  auto clipped = [&](double mu) {
    return (v - mu * y).cwiseMax(0.0).cwiseMin(c).eval();
  };
  // y^T clip(v - mu y) is non-increasing in mu.
  double lo = -1.0, hi = 1.0;
  while (y.dot(clipped(lo)) < 0.0) lo *= 2.0;
  while (y.dot(clipped(hi)) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (y.dot(clipped(mid)) > 0.0) lo = mid;
    else hi = mid;
  }
  return clipped(0.5 * (lo + hi));
}

struct QpOracleResult {
  Eigen::VectorXd alpha;
  double dual_objective = 0.0;  // maximization form: 1^T a - 1/2 a^T Q a
};

inline QpOracleResult solve_dual_reference(const Eigen::MatrixXd& gram, std::span<const int> labels, double c,
                                          int iterations = 200000) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[static_cast<std::size_t>(i)];
  const Eigen::MatrixXd q = y.asDiagonal() * gram * y.asDiagonal();
  const double lipschitz = std::max(1e-12, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q).eigenvalues().maxCoeff());
  const double step = 1.0 / lipschitz;
  auto objective = [&](const Eigen::VectorXd& a) { return 0.5 * a.dot(q * a) - a.sum(); };

  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd momentum = a;
  double t = 1.0;
  double previous = objective(a);
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd grad = q * momentum - Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd next = project_box_hyperplane(momentum - step * grad, y, c);
    const double value = objective(next);
    if (value > previous) {
      // Restart the momentum when the objective goes up.
      momentum = a;
      t = 1.0;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    momentum = next + ((t - 1.0) / t_next) * (next - a);
    a = next;
    t = t_next;
    previous = value;
    // Stop at a fixed point of the projected-gradient map.
    if (it % 50 == 0) {
      const Eigen::VectorXd g = q * a - Eigen::VectorXd::Ones(n);
      if ((a - project_box_hyperplane(a - step * g, y, c)).lpNorm<Eigen::Infinity>() < 1e-13 * std::max(1.0, c)) break;
    }
  }
  return {a, -objective(a)};
}

}  // namespace metakernel::testing
