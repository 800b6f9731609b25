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

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "metakernel/datasets.hpp"
#include "metakernel/kernels.hpp"

namespace metakernel {

struct TrainConfig {
  double c = 1.0;
  /// Maximal KKT violation accepted at termination.
  double tolerance = 1e-3;
  /// Iteration cap for one binary SMO run.
  std::int64_t max_passes = 1'000'000;
  /// Fixes the scan order used to break working-set ties.
  std::uint64_t seed = 0;

  void validate() const;
};

/// Dual solution of one soft-margin binary problem.
struct BinarySolution {
  std::vector<double> alpha;
  double bias = 0.0;
  double dual_objective = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
};

/// Sequential minimal optimization on a precomputed real Gram matrix with
/// labels in {-1, +1}. Working pairs: the maximal violator first, its partner
/// by largest second-order gain.
BinarySolution train_binary(const Eigen::MatrixXd& gram, std::span<const int> labels, const TrainConfig& config);
BinarySolution train_binary(const GramMatrix& gram, std::span<const int> labels, const TrainConfig& config);

/// sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
double dual_objective(const Eigen::MatrixXd& gram, std::span<const int> labels, std::span<const double> alpha);

struct KktReport {
  bool ok = false;
  bool box_feasible = false;
  double equality_residual = 0.0;
  double max_violation = 0.0;
  Eigen::Index worst_index = -1;
};

/// Checks the soft-margin optimality conditions from scratch (decision values
/// are recomputed from the Gram matrix, nothing is taken from the solver).
KktReport verify_kkt(const Eigen::MatrixXd& gram, std::span<const int> labels, std::span<const double> alpha,
                     double bias, double c, double tolerance);

/// One binary machine of a trained model: f(x) = sum_i coef_i Re K(sv_i, x) + bias.
struct BinaryMachine {
  RowMatrix support_vectors;
  std::vector<double> dual_coefs;
  double bias = 0.0;
};

struct SvmModel {
  KernelParams kernel_params;
  double c = 1.0;
  /// Class labels in ascending order.
  std::vector<int> classes;
  /// Two classes: one machine, positive side = classes[0].
  /// More classes: one-vs-rest machine per class.
  std::vector<BinaryMachine> machines;
  /// Applied to raw inputs before the kernel when present.
  std::optional<Scaler> scaler;

  std::size_t dimension() const;
  /// Kernel-space decision value of every machine (inputs already scaled).
  std::vector<double> machine_values(std::span<const double> scaled_x) const;
  /// One value per class; argmax is the prediction.
  std::vector<double> decision_values(std::span<const double> x) const;
  int predict(std::span<const double> x) const;
  std::vector<int> predict(const RowMatrix& xs) const;
};

/// Permutation sorting rows lexicographically by (features, label).
std::vector<std::size_t> canonical_order(const RowMatrix& xs, std::span<const int> labels);

struct OvrSolution {
  std::vector<int> classes;
  std::vector<BinarySolution> machines;
};

/// Binary or one-vs-rest solutions on a precomputed Gram matrix.
OvrSolution train_ovr(const Eigen::MatrixXd& gram, std::span<const int> labels, const TrainConfig& config,
                      unsigned threads = 1);

/// Decision values `cross.rows() x classes` where cross(i, j) = Re K(x_train_j, x_i).
Eigen::MatrixXd ovr_decisions(const OvrSolution& solution, const Eigen::MatrixXd& cross,
                              std::span<const int> train_labels);

/// Lowest class index wins ties.
std::vector<int> argmax_labels(const Eigen::MatrixXd& decisions, std::span<const int> classes);

/// Trains with the rows in canonical order, so the result does not depend on
/// the order of the input.
SvmModel train_multiclass(const RowMatrix& xs, std::span<const int> labels, const KernelParams& params,
                          const TrainConfig& config, unsigned threads = 1);

struct DecisionGrid {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> x_values;
  std::vector<double> y_values;
  /// Row-major over y then x. Binary: the raw decision value (positive means
  /// classes[0]); multiclass: the winning class's decision value.
  std::vector<double> values;
  std::vector<int> labels;
};

/// bounds = {x_min, x_max, y_min, y_max}. One point per axis lands on the center.
DecisionGrid decision_grid(const SvmModel& model, const std::array<double, 4>& bounds,
                           std::pair<std::size_t, std::size_t> resolution);

/// `row,col,x,y,decision,label`
void write_decision_grid_csv(std::ostream& out, const DecisionGrid& grid);

}  // namespace metakernel
