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

#include "metakernel/tuning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "metakernel/error.hpp"
#include "metakernel/io.hpp"
#include "metakernel/random.hpp"
#include "metakernel/serialization.hpp"

namespace metakernel {
namespace {

using Clock = std::chrono::steady_clock;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> sorted_unique(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

struct PreparedSplit {
  RowMatrix train_x;
  std::vector<int> train_y;
  RowMatrix eval_x;
  std::vector<int> eval_y;
};

PreparedSplit prepare(const Dataset& train, const Dataset& eval) {
  train.validate();
  eval.validate();
  if (train.dimension() != eval.dimension()) throw InputError("grid_search: train/eval dimension mismatch");
  const Scaler scaler = fit_scaler(train);
  const RowMatrix scaled = scaler.transform(train.features);
  const auto order = canonical_order(scaled, train.labels);
  PreparedSplit out;
  out.train_x.resize(scaled.rows(), scaled.cols());
  out.train_y.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.train_x.row(static_cast<Eigen::Index>(i)) = scaled.row(static_cast<Eigen::Index>(order[i]));
    out.train_y[i] = train.labels[order[i]];
  }
  out.eval_x = scaler.transform(eval.features);
  out.eval_y = eval.labels;
  return out;
}

double selection_value(const Scores& s, Metric metric) {
  return metric == Metric::Accuracy ? s.accuracy : s.macro_precision;
}

// Fills one cell per C value for a fixed kernel tuple.
void evaluate_tuple(const PreparedSplit& data, const KernelParams& params, const std::vector<double>& cs,
                    const TrainConfig& base, Metric metric, GridCell* cells) {
  const auto start = Clock::now();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    cells[i].params = params;
    cells[i].c = cs[i];
    cells[i].selection_score = kNegInf;
  }
  Eigen::MatrixXd gram_real;
  Eigen::MatrixXd cross;
  try {
    gram_real = gram(data.train_x, params).real_entries;
    cross = cross_gram_real(data.eval_x, data.train_x, params);
  } catch (const Error& e) {
    for (std::size_t i = 0; i < cs.size(); ++i) cells[i].error = e.what();
    return;
  }
  const double kernel_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const auto cell_start = Clock::now();
    GridCell& cell = cells[i];
    try {
      TrainConfig config = base;
      config.c = cs[i];
      const OvrSolution solution = train_ovr(gram_real, data.train_y, config);
      for (const auto& m : solution.machines) {
        if (!m.converged) throw NumericalError("solver hit the iteration cap");
      }
      const auto train_pred = argmax_labels(ovr_decisions(solution, gram_real, data.train_y), solution.classes);
      const auto eval_pred = argmax_labels(ovr_decisions(solution, cross, data.train_y), solution.classes);
      cell.train = score(data.train_y, train_pred);
      cell.test = score(data.eval_y, eval_pred);
      cell.selection_score = selection_value(cell.test, metric);
    } catch (const Error& e) {
      cell.error = e.what();
      cell.selection_score = kNegInf;
    }
    cell.wall_seconds = kernel_seconds / static_cast<double>(cs.size()) +
                        std::chrono::duration<double>(Clock::now() - cell_start).count();
  }
}

std::vector<GridCell> evaluate_grid(const PreparedSplit& data, const GridSpec& spec, const TrainConfig& config,
                                    unsigned threads) {
  const auto tuples = spec.kernel_tuples();
  const auto cs = spec.sorted_c();
  std::vector<GridCell> table(tuples.size() * cs.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(tuples.size())));
  auto run = [&](std::size_t t) { evaluate_tuple(data, tuples[t], cs, config, spec.metric, &table[t * cs.size()]); };
  if (threads == 1) {
    for (std::size_t t = 0; t < tuples.size(); ++t) run(t);
  } else {
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t t = w; t < tuples.size(); t += threads) run(t);
      });
    }
    for (auto& w : workers) w.join();
  }
  return table;
}

TuneResult select_best(std::vector<GridCell> table, Metric metric) {
  TuneResult result;
  result.metric = metric;
  result.table = std::move(table);
  const GridCell* best = nullptr;
  for (const auto& cell : result.table) {
    if (cell.selection_score == kNegInf) continue;
    if (best == nullptr || cell.selection_score > best->selection_score ||
        (cell.selection_score == best->selection_score && tuple_less(cell, *best))) {
      best = &cell;
    }
  }
  if (best == nullptr) {
    throw NumericalError("grid_search: every cell failed" +
                         (result.table.empty() ? std::string() : " (first error: " + result.table.front().error + ")"));
  }
  result.best = *best;
  result.best_score = best->selection_score;
  return result;
}

std::string csv_safe(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string_view metric_name(Metric metric) {
  return metric == Metric::Accuracy ? "accuracy" : "macro_precision";
}

Metric parse_metric(std::string_view name) {
  if (name == "accuracy") return Metric::Accuracy;
  if (name == "macro_precision" || name == "precision") return Metric::MacroPrecision;
  throw InputError("unknown metric '" + std::string(name) + "'");
}

GridSpec GridSpec::defaults(Family family) {
  GridSpec spec;
  spec.family = family;
  spec.c = {0.1, 1.0, 10.0, 100.0};
  if (family == Family::Rbf) {
    spec.gamma = {0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
  } else {
    spec.alpha = {0.1, 0.5, 1.0, 2.0};
    spec.k = {0.5, 1.0, 1.5, 2.0};
    spec.z = {0.2, 1.0, 2.0, 3.0, 4.6};
  }
  return spec;
}

void GridSpec::validate() const {
  if (c.empty()) throw InputError("grid: C list is empty");
  for (double v : c) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("grid: C values must be positive");
  }
  if (family == Family::Rbf) {
    if (gamma.empty()) throw InputError("grid: gamma list is empty");
  } else if (alpha.empty() || k.empty() || z.empty()) {
    throw InputError("grid: alpha, k and z lists must be nonempty");
  }
  for (const auto& params : kernel_tuples()) {
    try {
      params.validate();
    } catch (const PoleError&) {
      // Pole combinations become failed cells.
    }
  }
}

std::vector<KernelParams> GridSpec::kernel_tuples() const {
  std::vector<KernelParams> out;
  if (family == Family::Rbf) {
    for (double g : sorted_unique(gamma)) out.push_back(KernelParams::rbf(g));
    return out;
  }
  for (double a : sorted_unique(alpha))
    for (double kk : sorted_unique(k))
      for (double zz : sorted_unique(z)) out.push_back(KernelParams{family, a, kk, zz, 1.0});
  return out;
}

std::vector<double> GridSpec::sorted_c() const { return sorted_unique(c); }

std::size_t GridSpec::cell_count() const { return kernel_tuples().size() * sorted_c().size(); }

Scores score(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw InputError("score: size mismatch");
  if (truth.empty()) throw InputError("score: empty input");
  const std::set<int> classes(truth.begin(), truth.end());
  Scores s;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i] ? 1 : 0;
  s.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  for (int c : classes) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (predicted[i] == c && truth[i] == c) ++tp;
      else if (predicted[i] == c) ++fp;
      else if (truth[i] == c) ++fn;
    }
    s.macro_precision += tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    s.macro_recall += static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  s.macro_precision /= static_cast<double>(classes.size());
  s.macro_recall /= static_cast<double>(classes.size());
  return s;
}

bool tuple_less(const GridCell& a, const GridCell& b) {
  return std::tie(a.params.alpha, a.params.k, a.params.z, a.c, a.params.gamma) <
         std::tie(b.params.alpha, b.params.k, b.params.z, b.c, b.params.gamma);
}

TuneResult grid_search(const Dataset& train, const Dataset& eval, const GridSpec& spec, const TrainConfig& config,
                       unsigned threads) {
  spec.validate();
  config.validate();
  const PreparedSplit data = prepare(train, eval);
  return select_best(evaluate_grid(data, spec, config, threads), spec.metric);
}

TuneResult grid_search_kfold(const Dataset& ds, const GridSpec& spec, const TrainConfig& config, std::size_t folds,
                             std::uint64_t seed, unsigned threads) {
  spec.validate();
  config.validate();
  if (folds < 2) throw InputError("grid_search_kfold: need at least 2 folds");
  Rng rng(seed);
  std::vector<std::size_t> fold_of(ds.size(), 0);
  for (std::size_t c = 0; c < ds.num_classes(); ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.labels[i] == static_cast<int>(c)) members.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t p = 0; p < members.size(); ++p) fold_of[members[p]] = p % folds;
  }

  std::vector<GridCell> combined;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train_rows, eval_rows;
    for (std::size_t i = 0; i < ds.size(); ++i) (fold_of[i] == f ? eval_rows : train_rows).push_back(i);
    if (eval_rows.empty()) throw InputError("grid_search_kfold: too many folds for the dataset size");
    const auto table = evaluate_grid(prepare(ds.subset(train_rows), ds.subset(eval_rows)), spec, config, threads);
    if (combined.empty()) {
      combined = table;
      continue;
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
      GridCell& cell = combined[i];
      const GridCell& next = table[i];
      if (!next.error.empty() && cell.error.empty()) cell.error = next.error;
      cell.train.accuracy += next.train.accuracy;
      cell.train.macro_precision += next.train.macro_precision;
      cell.train.macro_recall += next.train.macro_recall;
      cell.test.accuracy += next.test.accuracy;
      cell.test.macro_precision += next.test.macro_precision;
      cell.test.macro_recall += next.test.macro_recall;
      cell.wall_seconds += next.wall_seconds;
    }
  }
  const double n = static_cast<double>(folds);
  for (auto& cell : combined) {
    for (Scores* s : {&cell.train, &cell.test}) {
      s->accuracy /= n;
      s->macro_precision /= n;
      s->macro_recall /= n;
    }
    cell.selection_score = cell.error.empty() ? selection_value(cell.test, spec.metric) : kNegInf;
  }
  return select_best(std::move(combined), spec.metric);
}

std::string grid_table_csv(const TuneResult& result) {
  std::ostringstream out;
  out << "family,alpha,k,z,c,gamma,train_accuracy,train_macro_precision,train_macro_recall,"
         "test_accuracy,test_macro_precision,test_macro_recall,selection_score,error\n";
  for (const auto& cell : result.table) {
    out << family_name(cell.params.family) << ',' << format_double(cell.params.alpha) << ','
        << format_double(cell.params.k) << ',' << format_double(cell.params.z) << ',' << format_double(cell.c) << ','
        << format_double(cell.params.gamma) << ',' << format_double(cell.train.accuracy) << ','
        << format_double(cell.train.macro_precision) << ',' << format_double(cell.train.macro_recall) << ','
        << format_double(cell.test.accuracy) << ',' << format_double(cell.test.macro_precision) << ','
        << format_double(cell.test.macro_recall) << ',' << format_double(cell.selection_score) << ','
        << csv_safe(cell.error) << '\n';
  }
  return out.str();
}

std::string grid_timing_csv(const TuneResult& result) {
  std::ostringstream out;
  out << "family,alpha,k,z,c,gamma,wall_seconds\n";
  for (const auto& cell : result.table) {
    out << family_name(cell.params.family) << ',' << format_double(cell.params.alpha) << ','
        << format_double(cell.params.k) << ',' << format_double(cell.params.z) << ',' << format_double(cell.c) << ','
        << format_double(cell.params.gamma) << ',' << format_double(cell.wall_seconds) << '\n';
  }
  return out.str();
}

nlohmann::json tune_summary_json(const TuneResult& result, const GridSpec& spec) {
  std::size_t failed = 0;
  for (const auto& cell : result.table) failed += cell.error.empty() ? 0 : 1;
  nlohmann::json grid = {{"c", spec.sorted_c()}};
  if (spec.family == Family::Rbf) {
    grid["gamma"] = sorted_unique(spec.gamma);
  } else {
    grid["alpha"] = sorted_unique(spec.alpha);
    grid["k"] = sorted_unique(spec.k);
    grid["z"] = sorted_unique(spec.z);
  }
  return {{"family", std::string(family_name(spec.family))},
          {"metric", std::string(metric_name(result.metric))},
          {"grid", grid},
          {"cells", result.table.size()},
          {"failed_cells", failed},
          {"best",
           {{"kernel", to_json(result.best.params)},
            {"c", result.best.c},
            {"selection_score", result.best_score},
            {"train_accuracy", result.best.train.accuracy},
            {"test_accuracy", result.best.test.accuracy},
            {"test_macro_precision", result.best.test.macro_precision},
            {"test_macro_recall", result.best.test.macro_recall}}}};
}

EvaluationResult fit_and_evaluate(const Dataset& train, const Dataset& test, const KernelParams& params,
                                  const TrainConfig& config, unsigned threads) {
  train.validate();
  test.validate();
  const Scaler scaler = fit_scaler(train);
  EvaluationResult out;
  out.model = train_multiclass(scaler.transform(train.features), train.labels, params, config, threads);
  out.model.scaler = scaler;
  out.train = score(train.labels, out.model.predict(train.features));
  out.test = score(test.labels, out.model.predict(test.features));
  return out;
}

std::vector<LearningCurveRow> learning_curve(const Dataset& ds, const KernelParams& params, const TrainConfig& config,
                                             std::span<const double> fractions, int repeats, std::uint64_t seed,
                                             const LearningCurveOptions& options) {
  if (repeats < 1) throw InputError("learning_curve: repeats must be >= 1");
  if (fractions.empty()) throw InputError("learning_curve: no fractions given");
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw InputError("learning_curve: fractions must lie in (0, 1]");
  }
  const std::size_t classes = ds.num_classes();
  std::vector<std::vector<double>> train_acc(fractions.size()), test_acc(fractions.size());
  std::vector<std::size_t> sizes(fractions.size(), 0);
  for (int r = 0; r < repeats; ++r) {
    const std::uint64_t repeat_seed = seed + static_cast<std::uint64_t>(r);
    const auto [pool, held_out] = split(ds, 1.0 - options.holdout_fraction, repeat_seed, options.stratified);
    for (std::size_t f = 0; f < fractions.size(); ++f) {
      Dataset subset = pool;
      if (fractions[f] < 1.0) {
        try {
          subset = split(pool, fractions[f], repeat_seed ^ (0x9e3779b97f4a7c15ULL * (f + 1)), true).first;
        } catch (const InputError&) {
          throw InputError("learning_curve: fraction " + format_double(fractions[f]) + " is too small");
        }
      }
      const std::set<int> present(subset.labels.begin(), subset.labels.end());
      if (present.size() < classes) {
        throw InputError("learning_curve: fraction " + format_double(fractions[f]) + " does not contain all classes");
      }
      const auto eval = fit_and_evaluate(subset, held_out, params, config);
      train_acc[f].push_back(eval.train.accuracy);
      test_acc[f].push_back(eval.test.accuracy);
      sizes[f] = subset.size();
    }
  }
  std::vector<LearningCurveRow> rows;
  for (std::size_t f = 0; f < fractions.size(); ++f) {
    rows.push_back({fractions[f], sizes[f], mean(train_acc[f]), sample_std(train_acc[f]), mean(test_acc[f]),
                    sample_std(test_acc[f])});
  }
  return rows;
}

std::string learning_curve_csv(std::span<const LearningCurveRow> rows) {
  std::ostringstream out;
  out << "fraction,train_size,train_accuracy_mean,train_accuracy_std,test_accuracy_mean,test_accuracy_std\n";
  for (const auto& row : rows) {
    out << format_double(row.fraction) << ',' << row.train_size << ',' << format_double(row.train_mean) << ','
        << format_double(row.train_std) << ',' << format_double(row.test_mean) << ','
        << format_double(row.test_std) << '\n';
  }
  return out.str();
}

}  // namespace metakernel
