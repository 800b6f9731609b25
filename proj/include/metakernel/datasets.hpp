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
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metakernel/kernels.hpp"

namespace metakernel {

struct Dataset {
  RowMatrix features;
  std::vector<int> labels;
  std::string name;
  std::uint64_t generation_seed = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t dimension() const { return static_cast<std::size_t>(features.cols()); }
  /// max label + 1.
  std::size_t num_classes() const;
  std::vector<std::size_t> class_counts() const;
  /// Throws InputError on non-finite features, bad labels or shape mismatch.
  void validate() const;
  Dataset subset(const std::vector<std::size_t>& rows) const;
};

/// Two interleaving half circles. Class 0: (cos t, sin t); class 1:
/// (1 - cos t, 1/2 - sin t); t evenly spaced on [0, pi]. Gaussian noise with
/// the given standard deviation is added to x then y of each sample in order.
Dataset make_moons(std::size_t n, double noise, std::uint64_t seed);

/// Concentric circles. Class 0 on radius 1, class 1 on radius `factor`;
/// angles evenly spaced on [0, 2 pi) without the endpoint.
Dataset make_circles(std::size_t n, double noise, double factor, std::uint64_t seed);

/// Embedded Fisher iris data (150 x 4, three classes of 50), checksum-verified.
Dataset load_iris();

/// Seeded shuffle then split. In stratified mode each class contributes
/// round(fraction * class_size) rows to the training side.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed, bool stratified);

/// Per-feature affine map of [min, max] onto [0, pi].
struct Scaler {
  std::vector<double> min;
  std::vector<double> max;

  RowMatrix transform(const RowMatrix& x) const;
  RowMatrix inverse_transform(const RowMatrix& x) const;
  std::vector<double> transform(std::span<const double> x) const;
};

Scaler fit_scaler(const Dataset& train);
Dataset apply_scaler(const Scaler& scaler, const Dataset& ds);

/// Header `f0,...,f{d-1},label`; shortest round-trip decimals.
void write_csv(std::ostream& out, const Dataset& ds);
std::string to_csv(const Dataset& ds);
/// Labels are remapped onto 0..C-1 in ascending order of the raw values.
Dataset read_csv(std::istream& in, std::string name);


}  // namespace metakernel
