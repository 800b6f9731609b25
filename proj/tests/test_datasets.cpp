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

#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "metakernel/datasets.hpp"
#include "metakernel/error.hpp"
#include "metakernel/random.hpp"

namespace metakernel {
namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformAndBelowRanges) {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    ASSERT_LT(rng.below(7), 7u);
  }
  EXPECT_NEAR(sum / 20000.0, 0.5, 0.01);
}

TEST(Rng, NormalMoments) {
  Rng rng(9);
  double s = 0.0, s2 = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.02);
  EXPECT_NEAR(s2 / n, 1.0, 0.03);
}

TEST(Moons, NoiselessGeometry) {
  const Dataset ds = make_moons(10, 0.0, 0);
  ASSERT_EQ(ds.size(), 10u);
  EXPECT_EQ(ds.features(0, 0), 1.0);
  EXPECT_EQ(ds.features(0, 1), 0.0);
  EXPECT_EQ(ds.labels[0], 0);
  EXPECT_EQ(ds.features(5, 0), 0.0);
  EXPECT_EQ(ds.features(5, 1), 0.5);
  EXPECT_EQ(ds.labels[5], 1);
  for (Eigen::Index i = 0; i < 5; ++i) {
    EXPECT_NEAR(std::hypot(ds.features(i, 0), ds.features(i, 1)), 1.0, 1e-15);
    EXPECT_NEAR(std::hypot(1.0 - ds.features(i + 5, 0), 0.5 - ds.features(i + 5, 1)), 1.0, 1e-15);
  }
}

TEST(Moons, SeededNoiseIsReproducible) {
  const Dataset a = make_moons(100, 0.2, 7);
  const Dataset b = make_moons(100, 0.2, 7);
  const Dataset c = make_moons(100, 0.2, 8);
  EXPECT_EQ(to_csv(a), to_csv(b));
  EXPECT_NE(to_csv(a), to_csv(c));
  EXPECT_EQ(a.class_counts(), (std::vector<std::size_t>{50, 50}));
}

TEST(Moons, RejectsBadArguments) {
  EXPECT_THROW(make_moons(7, 0.1, 0), InputError);
  EXPECT_THROW(make_moons(0, 0.1, 0), InputError);
  EXPECT_THROW(make_moons(10, -0.1, 0), InputError);
  EXPECT_THROW(make_moons(10, NAN, 0), InputError);
}

TEST(Circles, RadiiAndClasses) {
  const Dataset ds = make_circles(40, 0.0, 0.5, 3);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double r = ds.features.row(static_cast<Eigen::Index>(i)).norm();
    EXPECT_NEAR(r, ds.labels[i] == 0 ? 1.0 : 0.5, 1e-15);
  }
  EXPECT_THROW(make_circles(40, 0.0, 1.0, 3), InputError);
}

TEST(Iris, EmbeddedTableIsIntact) {
  const Dataset iris = load_iris();
  EXPECT_EQ(iris.size(), 150u);
  EXPECT_EQ(iris.dimension(), 4u);
  EXPECT_EQ(iris.class_counts(), (std::vector<std::size_t>{50, 50, 50}));
  EXPECT_EQ(iris.features(0, 0), 5.1);
  EXPECT_EQ(iris.features(0, 1), 3.5);
  EXPECT_EQ(iris.features(149, 0), 5.9);
  EXPECT_EQ(iris.features(149, 3), 1.8);
  EXPECT_EQ(iris.labels[149], 2);
  EXPECT_NEAR(iris.features.col(0).mean(), 5.843333333333333, 1e-12);
}

TEST(Split, StratifiedKeepsClassProportions) {
  const Dataset iris = load_iris();
  const auto [train, test] = split(iris, 0.7, 11, true);
  EXPECT_EQ(train.class_counts(), (std::vector<std::size_t>{35, 35, 35}));
  EXPECT_EQ(test.class_counts(), (std::vector<std::size_t>{15, 15, 15}));
}

TEST(Split, PartitionsRowsAndIsSeeded) {
  const Dataset ds = make_moons(60, 0.1, 2);
  const auto [a_train, a_test] = split(ds, 0.7, 5, false);
  const auto [b_train, b_test] = split(ds, 0.7, 5, false);
  EXPECT_EQ(a_train.size(), 42u);
  EXPECT_EQ(a_test.size(), 18u);
  EXPECT_EQ(to_csv(a_train), to_csv(b_train));
  std::multiset<double> original, recombined;
  for (Eigen::Index i = 0; i < ds.features.rows(); ++i) original.insert(ds.features(i, 0));
  for (Eigen::Index i = 0; i < a_train.features.rows(); ++i) recombined.insert(a_train.features(i, 0));
  for (Eigen::Index i = 0; i < a_test.features.rows(); ++i) recombined.insert(a_test.features(i, 0));
  EXPECT_EQ(original, recombined);
  EXPECT_THROW(split(ds, 1.0, 5, false), InputError);
  EXPECT_THROW(split(ds, 0.001, 5, false), InputError);
}

TEST(Scaler, MapsTrainingRangeOntoZeroPi) {
  const Dataset iris = load_iris();
  const Scaler s = fit_scaler(iris);
  const RowMatrix scaled = s.transform(iris.features);
  for (Eigen::Index j = 0; j < 4; ++j) {
    EXPECT_NEAR(scaled.col(j).minCoeff(), 0.0, 1e-15);
    EXPECT_NEAR(scaled.col(j).maxCoeff(), std::numbers::pi, 1e-14);
  }
  EXPECT_TRUE(s.inverse_transform(scaled).isApprox(iris.features, 1e-14));

  const std::vector<double> row{iris.features(3, 0), iris.features(3, 1), iris.features(3, 2), iris.features(3, 3)};
  const auto one = s.transform(std::span<const double>(row));
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(one[j], scaled(3, static_cast<Eigen::Index>(j)));
}

TEST(Scaler, ConstantFeatureIsRejected) {
  Dataset ds;
  ds.features = RowMatrix::Ones(4, 2);
  ds.features(1, 0) = 2.0;
  ds.labels = {0, 1, 0, 1};
  EXPECT_THROW(fit_scaler(ds), InputError);
}

TEST(Csv, RoundTripIsBitExact) {
  const Dataset ds = make_moons(50, 0.3, 4);
  std::istringstream in(to_csv(ds));
  const Dataset back = read_csv(in, "moons");
  EXPECT_EQ(back.features, ds.features);
  EXPECT_EQ(back.labels, ds.labels);
  EXPECT_EQ(to_csv(back), to_csv(ds));
}

TEST(Csv, RemapsLabelsAndRejectsJunk) {
  std::istringstream in("f0,f1,label\n0.5,1,7\n1,2,-3\n\n2,3,7\n");
  const Dataset ds = read_csv(in, "x");
  EXPECT_EQ(ds.labels, (std::vector<int>{1, 0, 1}));

  std::istringstream bad_header("a,b\n1,2\n");
  EXPECT_THROW(read_csv(bad_header, "x"), InputError);
  std::istringstream ragged("f0,label\n1,2,3\n");
  EXPECT_THROW(read_csv(ragged, "x"), InputError);
  std::istringstream non_numeric("f0,label\nabc,1\n");
  EXPECT_THROW(read_csv(non_numeric, "x"), InputError);
  std::istringstream non_finite("f0,label\nnan,1\n");
  EXPECT_THROW(read_csv(non_finite, "x"), InputError);
}

}  // namespace
}  // namespace metakernel
