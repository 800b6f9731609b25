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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "metakernel/datasets.hpp"
#include "metakernel/kernels.hpp"
#include "metakernel/svm.hpp"

namespace metakernel {

enum class Metric { Accuracy, MacroPrecision };

std::string_view metric_name(Metric metric);
Metric parse_metric(std::string_view name);

/// Cartesian hyperparameter grid. For the deformed families alpha, k, z and c
/// are searched; for Rbf gamma and c.
struct GridSpec {
  Family family = Family::Rbf;
  std::vector<double> alpha;
  std::vector<double> k;
  std::vector<double> z;
  std::vector<double> c;
  std::vector<double> gamma;
  Metric metric = Metric::Accuracy;

  /// alpha {0.1, 0.5, 1, 2}, k {0.5, 1, 1.5, 2}, z {0.2, 1, 2, 3, 4.6},
  /// gamma {0.1, 0.5, 1, 2, 5, 10}, C {0.1, 1, 10, 100}.
  static GridSpec defaults(Family family);
  void validate() const;
  /// Kernel parameter tuples in ascending lexicographic order, de-duplicated.
  std::vector<KernelParams> kernel_tuples() const;
  std::vector<double> sorted_c() const;
  std::size_t cell_count() const;
};

struct Scores {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
};

/// Macro averages run over the classes present in `truth`; a class that is
/// never predicted has precision 0.
Scores score(std::span<const int> truth, std::span<const int> predicted);

struct GridCell {
  KernelParams params;
  double c = 0.0;
  Scores train;
  Scores test;
  double selection_score = 0.0;
  std::string error;
  double wall_seconds = 0.0;
};

struct TuneResult {
  Metric metric = Metric::Accuracy;
  GridCell best;
  double best_score = 0.0;
  std::vector<GridCell> table;
};

/// Parameter tuple order used for tie breaking: (alpha, k, z, c, gamma).
bool tuple_less(const GridCell& a, const GridCell& b);

/// Exhaustive search. Features are scaled with a Scaler fitted on `train`;
/// every cell is scored on `eval`. Failed cells carry their error message
/// and a selection score of -inf.
TuneResult grid_search(const Dataset& train, const Dataset& eval, const GridSpec& spec, const TrainConfig& config,
                       unsigned threads = 1);

/// Same grid scored by stratified k-fold cross-validation on `ds`; the test
/// scores of each cell are fold means.
TuneResult grid_search_kfold(const Dataset& ds, const GridSpec& spec, const TrainConfig& config, std::size_t folds,
                             std::uint64_t seed, unsigned threads = 1);

/// One row per cell, no timing columns, so reruns compare byte for byte.
std::string grid_table_csv(const TuneResult& result);
std::string grid_timing_csv(const TuneResult& result);
nlohmann::json tune_summary_json(const TuneResult& result, const GridSpec& spec);

struct EvaluationResult {
  SvmModel model;
  Scores train;
  Scores test;
};

/// Fits the scaler on `train`, trains, and scores both sides.
EvaluationResult fit_and_evaluate(const Dataset& train, const Dataset& test, const KernelParams& params,
                                  const TrainConfig& config, unsigned threads = 1);

struct LearningCurveRow {
  double fraction = 0.0;
  std::size_t train_size = 0;
  double train_mean = 0.0;
  double train_std = 0.0;
  double test_mean = 0.0;
  double test_std = 0.0;
};

struct LearningCurveOptions {
  double holdout_fraction = 0.3;
  bool stratified = true;
};

/// For each repeat r the data is re-split (seed + r) into a training pool and
/// a held-out set; each fraction trains on a stratified subsample of the pool.
/// Fraction 1 uses the whole pool.
std::vector<LearningCurveRow> learning_curve(const Dataset& ds, const KernelParams& params, const TrainConfig& config,
                                             std::span<const double> fractions, int repeats, std::uint64_t seed,
                                             const LearningCurveOptions& options = {});

std::string learning_curve_csv(std::span<const LearningCurveRow> rows);

}  // namespace metakernel
