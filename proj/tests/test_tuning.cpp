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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "metakernel/error.hpp"
#include "metakernel/random.hpp"
#include "metakernel/tuning.hpp"

namespace metakernel {
namespace {

TEST(Score, HandComputedMacroAverages) {
  const std::vector<int> truth{0, 0, 0, 1, 1, 2};
  const std::vector<int> predicted{0, 0, 1, 1, 0, 0};
  const Scores s = score(truth, predicted);
  EXPECT_DOUBLE_EQ(s.accuracy, 3.0 / 6.0);
  // precision: class0 2/4, class1 1/2, class2 never predicted -> 0
  EXPECT_DOUBLE_EQ(s.macro_precision, (0.5 + 0.5 + 0.0) / 3.0);
  EXPECT_DOUBLE_EQ(s.macro_recall, (2.0 / 3.0 + 0.5 + 0.0) / 3.0);
  EXPECT_THROW(score(truth, std::vector<int>{0}), InputError);
}

TEST(Metric, Names) {
  EXPECT_EQ(parse_metric("accuracy"), Metric::Accuracy);
  EXPECT_EQ(parse_metric(metric_name(Metric::MacroPrecision)), Metric::MacroPrecision);
  EXPECT_THROW(parse_metric("f1"), InputError);
}

TEST(GridSpec, DefaultSizesAndOrdering) {
  EXPECT_EQ(GridSpec::defaults(Family::AlphaSU2).cell_count(), 4u * 4u * 5u * 4u);
  EXPECT_EQ(GridSpec::defaults(Family::Rbf).cell_count(), 6u * 4u);
  GridSpec spec;
  spec.family = Family::AlphaSU11;
  spec.alpha = {2.0, 0.5, 2.0};
  spec.k = {1.0};
  spec.z = {3.0, 1.0};
  spec.c = {10.0, 1.0, 10.0};
  const auto tuples = spec.kernel_tuples();
  ASSERT_EQ(tuples.size(), 4u);
  EXPECT_EQ(tuples[0].alpha, 0.5);
  EXPECT_EQ(tuples[0].z, 1.0);
  EXPECT_EQ(tuples[1].z, 3.0);
  EXPECT_EQ(spec.sorted_c(), (std::vector<double>{1.0, 10.0}));
  spec.c.clear();
  EXPECT_THROW(spec.validate(), InputError);
  spec.c = {1.0};
  spec.k = {0.25};
  EXPECT_THROW(spec.validate(), DomainError);
}

GridSpec single_cell(const KernelParams& p, double c) {
  GridSpec spec;
  spec.family = p.family;
  if (p.family == Family::Rbf) {
    spec.gamma = {p.gamma};
  } else {
    spec.alpha = {p.alpha};
    spec.k = {p.k};
    spec.z = {p.z};
  }
  spec.c = {c};
  return spec;
}

TEST(GridSearch, SingleCellMatchesDirectEvaluation) {
  const auto [train, test] = split(make_moons(120, 0.2, 1), 0.7, 2, false);
  const KernelParams p = KernelParams::su2(0.5, 1.0, 2.0);
  TrainConfig cfg;
  cfg.c = 10.0;
  const TuneResult result = grid_search(train, test, single_cell(p, 10.0), cfg);
  ASSERT_EQ(result.table.size(), 1u);
  const EvaluationResult direct = fit_and_evaluate(train, test, p, cfg);
  EXPECT_EQ(result.best.test.accuracy, direct.test.accuracy);
  EXPECT_EQ(result.best.train.accuracy, direct.train.accuracy);
  EXPECT_EQ(result.best_score, direct.test.accuracy);
}

TEST(GridSearch, TiesGoToTheSmallestTuple) {
  // Two far-apart blobs: every cell scores 1.
  Dataset ds;
  ds.name = "blobs";
  ds.features.resize(20, 2);
  Rng rng(4);
  for (Eigen::Index i = 0; i < 20; ++i) {
    const double centre = i < 10 ? 0.0 : 10.0;
    ds.features(i, 0) = centre + 0.1 * rng.normal();
    ds.features(i, 1) = centre + 0.1 * rng.normal();
    ds.labels.push_back(i < 10 ? 0 : 1);
  }
  GridSpec spec;
  spec.family = Family::AlphaSU2;
  spec.alpha = {1.0, 0.5};
  spec.k = {1.0, 0.5};
  spec.z = {1.0};
  spec.c = {10.0, 1.0};
  const TuneResult result = grid_search(ds, ds, spec, TrainConfig{});
  for (const auto& cell : result.table) ASSERT_EQ(cell.selection_score, 1.0) << cell.error;
  EXPECT_EQ(result.best.params.alpha, 0.5);
  EXPECT_EQ(result.best.params.k, 0.5);
  EXPECT_EQ(result.best.c, 1.0);
}

TEST(GridSearch, TableDoesNotDependOnRowOrder) {
  const auto [train, test] = split(load_iris(), 0.7, 3, true);
  std::vector<std::size_t> perm(train.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(8);
  rng.shuffle(std::span<std::size_t>(perm));
  GridSpec spec;
  spec.family = Family::AlphaSU11;
  spec.alpha = {0.5, 1.0};
  spec.k = {1.0};
  spec.z = {1.0, 2.0};
  spec.c = {1.0, 10.0};
  const auto a = grid_search(train, test, spec, TrainConfig{});
  const auto b = grid_search(train.subset(perm), test, spec, TrainConfig{}, 2);
  EXPECT_EQ(grid_table_csv(a), grid_table_csv(b));
}

TEST(GridSearch, PoleCellsFailWithoutAbortingTheSearch) {
  const auto [train, test] = split(make_moons(60, 0.1, 1), 0.7, 2, false);
  GridSpec spec;
  spec.family = Family::AlphaSU2;
  spec.alpha = {2.0};
  spec.k = {1.0};
  spec.z = {std::acos(-1.0) / 2.0, 1.0};  // angle = z exactly on the pole for alpha = 2
  spec.c = {1.0};
  const auto result = grid_search(train, test, spec, TrainConfig{});
  ASSERT_EQ(result.table.size(), 2u);
  EXPECT_FALSE(result.table[1].error.empty());
  EXPECT_EQ(result.table[1].selection_score, -INFINITY);
  EXPECT_EQ(result.best.params.z, 1.0);

  spec.z = {std::acos(-1.0) / 2.0};
  EXPECT_THROW(grid_search(train, test, spec, TrainConfig{}), NumericalError);
}

TEST(GridSearch, NonConvergedCellsCountAsFailures) {
  const auto [train, test] = split(make_moons(60, 0.3, 1), 0.7, 2, false);
  TrainConfig cfg;
  cfg.max_passes = 3;
  GridSpec spec = single_cell(KernelParams::rbf(1.0), 1.0);
  spec.c = {1.0, 100.0};
  EXPECT_THROW(grid_search(train, test, spec, cfg), NumericalError);
}

TEST(GridSearch, KFoldAveragesFolds) {
  const Dataset iris = load_iris();
  const auto result = grid_search_kfold(iris, single_cell(KernelParams::rbf(1.0), 10.0), TrainConfig{}, 5, 0);
  ASSERT_EQ(result.table.size(), 1u);
  EXPECT_GT(result.best.test.accuracy, 0.9);
  EXPECT_LE(result.best.test.accuracy, 1.0);
  EXPECT_THROW(grid_search_kfold(iris, single_cell(KernelParams::rbf(1.0), 1.0), TrainConfig{}, 1, 0),
               InputError);
}

TEST(GridSearch, SummaryAndCsvShapes) {
  const auto [train, test] = split(make_moons(60, 0.2, 5), 0.7, 2, false);
  GridSpec spec = single_cell(KernelParams::rbf(1.0), 1.0);
  spec.gamma = {0.5, 1.0};
  const auto result = grid_search(train, test, spec, TrainConfig{});
  const std::string table = grid_table_csv(result);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 3);
  EXPECT_EQ(table.find("wall"), std::string::npos);
  const auto summary = tune_summary_json(result, spec);
  EXPECT_EQ(summary["cells"], 2);
  EXPECT_EQ(summary["failed_cells"], 0);
  EXPECT_EQ(summary["best"]["kernel"]["family"], "rbf");
}

TEST(LearningCurve, FullFractionEqualsDirectTraining) {
  const Dataset iris = load_iris();
  const KernelParams p = KernelParams::su2(0.5, 1.0, 1.0);
  const std::vector<double> fractions{0.5, 1.0};
  const auto rows = learning_curve(iris, p, TrainConfig{}, fractions, 1, 21);
  ASSERT_EQ(rows.size(), 2u);
  const auto [pool, held_out] = split(iris, 0.7, 21, true);
  const auto direct = fit_and_evaluate(pool, held_out, p, TrainConfig{});
  EXPECT_EQ(rows[1].train_size, pool.size());
  EXPECT_EQ(rows[1].test_mean, direct.test.accuracy);
  EXPECT_EQ(rows[1].train_mean, direct.train.accuracy);
  EXPECT_EQ(rows[1].test_std, 0.0);
  EXPECT_LT(rows[0].train_size, rows[1].train_size);
}

TEST(LearningCurve, RowsPerFractionAndCsv) {
  const Dataset ds = make_moons(100, 0.2, 3);
  const std::vector<double> fractions{0.2, 0.4, 0.6, 0.8, 1.0};
  LearningCurveOptions opts;
  opts.stratified = false;
  const auto rows = learning_curve(ds, KernelParams::rbf(1.0), TrainConfig{}, fractions, 3, 0, opts);
  ASSERT_EQ(rows.size(), fractions.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].fraction, fractions[i]);
    EXPECT_GE(rows[i].test_std, 0.0);
  }
  const std::string csv = learning_curve_csv(rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  EXPECT_THROW(learning_curve(ds, KernelParams::rbf(1.0), TrainConfig{}, std::vector<double>{0.0}, 1, 0),
               InputError);
  EXPECT_THROW(learning_curve(ds, KernelParams::rbf(1.0), TrainConfig{}, fractions, 0, 0), InputError);
}

TEST(LearningCurve, NoiselessCirclesImproveWithData) {
  const Dataset ds = make_circles(200, 0.0, 0.5, 0);
  const std::vector<double> fractions{0.1, 0.3, 0.6, 1.0};
  TrainConfig cfg;
  cfg.c = 10.0;
  const auto rows = learning_curve(ds, KernelParams::su2(0.5, 1.0, 1.0), cfg, fractions, 3, 1);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i].test_mean, rows[i - 1].test_mean - 0.05);
  EXPECT_GE(rows.back().test_mean, 0.95);
}

}  // namespace
}  // namespace metakernel
