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

#include "metakernel/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "iris_data.hpp"
#include "metakernel/error.hpp"
#include "metakernel/io.hpp"
#include "metakernel/random.hpp"

namespace metakernel {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

void add_noise(RowMatrix& features, double noise, Rng& rng) {
  if (noise == 0.0) return;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) features(i, j) += noise * rng.normal();
  }
}

void check_generator_args(std::size_t n, double noise, const char* what) {
  if (n < 2 || n % 2 != 0) throw InputError(std::string(what) + ": n must be even and >= 2");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw InputError(std::string(what) + ": noise must be >= 0");
}

}  // namespace

std::size_t Dataset::num_classes() const {
  if (labels.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes(), 0);
  for (int label : labels) ++counts[static_cast<std::size_t>(label)];
  return counts;
}

void Dataset::validate() const {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw InputError("dataset '" + name + "': feature rows and label count differ");
  }
  if (!features.allFinite()) throw InputError("dataset '" + name + "': non-finite feature values");
  for (int label : labels) {
    if (label < 0) throw InputError("dataset '" + name + "': negative label");
  }
  if (size() < num_classes()) throw InputError("dataset '" + name + "': fewer samples than classes");
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.name = name;
  out.generation_seed = generation_seed;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
  }
  return out;
}

Dataset make_moons(std::size_t n, double noise, std::uint64_t seed) {
  check_generator_args(n, noise, "make_moons");
  const std::size_t half = n / 2;
  Dataset ds;
  ds.name = "moons";
  ds.generation_seed = seed;
  ds.features.resize(static_cast<Eigen::Index>(n), 2);
  ds.labels.resize(n);
  for (std::size_t i = 0; i < half; ++i) {
    const double t = half == 1 ? 0.0 : std::numbers::pi * static_cast<double>(i) / static_cast<double>(half - 1);
    const auto upper = static_cast<Eigen::Index>(i);
    const auto lower = static_cast<Eigen::Index>(half + i);
    ds.features(upper, 0) = std::cos(t);
    ds.features(upper, 1) = std::sin(t);
    ds.labels[i] = 0;
    ds.features(lower, 0) = 1.0 - std::cos(t);
    ds.features(lower, 1) = 0.5 - std::sin(t);
    ds.labels[half + i] = 1;
  }
  Rng rng(seed);
  add_noise(ds.features, noise, rng);
  return ds;
}

Dataset make_circles(std::size_t n, double noise, double factor, std::uint64_t seed) {
  check_generator_args(n, noise, "make_circles");
  if (!(factor > 0.0 && factor < 1.0)) throw InputError("make_circles: factor must lie in (0, 1)");
  const std::size_t half = n / 2;
  Dataset ds;
  ds.name = "circles";
  ds.generation_seed = seed;
  ds.features.resize(static_cast<Eigen::Index>(n), 2);
  ds.labels.resize(n);
  for (std::size_t i = 0; i < half; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(half);
    const auto outer = static_cast<Eigen::Index>(i);
    const auto inner = static_cast<Eigen::Index>(half + i);
    ds.features(outer, 0) = std::cos(t);
    ds.features(outer, 1) = std::sin(t);
    ds.labels[i] = 0;
    ds.features(inner, 0) = factor * std::cos(t);
    ds.features(inner, 1) = factor * std::sin(t);
    ds.labels[half + i] = 1;
  }
  Rng rng(seed);
  add_noise(ds.features, noise, rng);
  return ds;
}

Dataset load_iris() {
  const std::string_view text(detail::kIrisCsv);
  if (fnv1a64(text) != detail::kIrisChecksum) throw IoError("load_iris: embedded data failed its checksum");
  Dataset ds;
  ds.name = "iris";
  ds.features.resize(150, 4);
  ds.labels.reserve(150);
  std::size_t row = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    const auto fields = split_fields(text.substr(start, end - start));
    for (Eigen::Index j = 0; j < 4; ++j) {
      ds.features(static_cast<Eigen::Index>(row), j) = parse_double(fields[static_cast<std::size_t>(j)]);
    }
    ds.labels.push_back(static_cast<int>(parse_int(fields[4])));
    ++row;
    start = end + 1;
  }
  if (row != 150) throw IoError("load_iris: expected 150 rows");
  return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed, bool stratified) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InputError("split: train fraction must lie in (0, 1)");
  Rng rng(seed);
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  if (stratified) {
    for (std::size_t c = 0; c < ds.num_classes(); ++c) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.labels[i] == static_cast<int>(c)) members.push_back(i);
      }
      rng.shuffle(std::span<std::size_t>(members));
      const auto take = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(members.size())));
      train_rows.insert(train_rows.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
      test_rows.insert(test_rows.end(), members.begin() + static_cast<std::ptrdiff_t>(take), members.end());
    }
    // Interleave classes so downstream consumers do not see sorted blocks.
    rng.shuffle(std::span<std::size_t>(train_rows));
    rng.shuffle(std::span<std::size_t>(test_rows));
  } else {
    std::vector<std::size_t> order(ds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(std::span<std::size_t>(order));
    const auto take = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(ds.size())));
    train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
    test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(take), order.end());
  }
  if (train_rows.empty() || test_rows.empty()) {
    throw InputError("split: fraction " + format_double(train_fraction) + " leaves one side empty");
  }
  return {ds.subset(train_rows), ds.subset(test_rows)};
}

RowMatrix Scaler::transform(const RowMatrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != min.size()) throw InputError("scaler: dimension mismatch");
  RowMatrix out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto f = static_cast<std::size_t>(j);
    const double scale = std::numbers::pi / (max[f] - min[f]);
    for (Eigen::Index i = 0; i < x.rows(); ++i) out(i, j) = (x(i, j) - min[f]) * scale;
  }
  return out;
}

RowMatrix Scaler::inverse_transform(const RowMatrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != min.size()) throw InputError("scaler: dimension mismatch");
  RowMatrix out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto f = static_cast<std::size_t>(j);
    const double scale = (max[f] - min[f]) / std::numbers::pi;
    for (Eigen::Index i = 0; i < x.rows(); ++i) out(i, j) = x(i, j) * scale + min[f];
  }
  return out;
}

std::vector<double> Scaler::transform(std::span<const double> x) const {
  if (x.size() != min.size()) throw InputError("scaler: dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t f = 0; f < x.size(); ++f) out[f] = (x[f] - min[f]) * (std::numbers::pi / (max[f] - min[f]));
  return out;
}

Scaler fit_scaler(const Dataset& train) {
  if (train.size() == 0) throw InputError("fit_scaler: empty dataset");
  Scaler s;
  for (Eigen::Index j = 0; j < train.features.cols(); ++j) {
    const double lo = train.features.col(j).minCoeff();
    const double hi = train.features.col(j).maxCoeff();
    if (!(hi > lo)) throw InputError("fit_scaler: feature " + std::to_string(j) + " is constant");
    s.min.push_back(lo);
    s.max.push_back(hi);
  }
  return s;
}

Dataset apply_scaler(const Scaler& scaler, const Dataset& ds) {
  Dataset out = ds;
  out.features = scaler.transform(ds.features);
  return out;
}

void write_csv(std::ostream& out, const Dataset& ds) {
  for (std::size_t j = 0; j < ds.dimension(); ++j) out << 'f' << j << ',';
  out << "label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < ds.dimension(); ++j) {
      out << format_double(ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << ',';
    }
    out << ds.labels[i] << '\n';
  }
}

std::string to_csv(const Dataset& ds) {
  std::ostringstream out;
  write_csv(out, ds);
  return out.str();
}

Dataset read_csv(std::istream& in, std::string name) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("read_csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_fields(line);
  if (header.size() < 2 || header.back() != "label") {
    throw InputError("read_csv: header must be f0,...,f{d-1},label");
  }
  const std::size_t d = header.size() - 1;
  std::vector<double> values;
  std::vector<std::int64_t> raw_labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != d + 1) throw InputError("read_csv: wrong field count on line " + std::to_string(line_no));
    for (std::size_t j = 0; j < d; ++j) values.push_back(parse_double(fields[j]));
    raw_labels.push_back(parse_int(fields[d]));
  }
  std::map<std::int64_t, int> remap;
  for (auto l : raw_labels) remap.emplace(l, 0);
  int next = 0;
  for (auto& [raw, dense] : remap) dense = next++;

  Dataset ds;
  ds.name = std::move(name);
  ds.features = Eigen::Map<RowMatrix>(values.data(), static_cast<Eigen::Index>(raw_labels.size()),
                                      static_cast<Eigen::Index>(d));
  for (auto l : raw_labels) ds.labels.push_back(remap[l]);
  ds.validate();
  return ds;
}

}  // namespace metakernel
