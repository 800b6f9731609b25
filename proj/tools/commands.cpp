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

#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "manifest.hpp"
#include "metakernel/datasets.hpp"
#include "metakernel/error.hpp"
#include "metakernel/geometry.hpp"
#include "metakernel/io.hpp"
#include "metakernel/kernels.hpp"
#include "metakernel/serialization.hpp"
#include "metakernel/svm.hpp"
#include "metakernel/tuning.hpp"
#include "metakernel/version.hpp"

namespace metakernel::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct CommonOptions {
  std::string out_dir;
  unsigned threads = 1;
};

struct KernelOptions {
  std::string family = "su2";
  double alpha = 0.5;
  double k = 1.0;
  double z = 1.0;
  double gamma = 1.0;

  KernelParams params() const {
    const KernelParams p{parse_family(family), alpha, k, z, gamma};
    p.validate();
    return p;
  }
};

struct DataOptions {
  std::string dataset = "moons";
  std::string csv;
  std::size_t n = 1000;
  double noise = -1.0;  // < 0: dataset default
  double factor = 0.5;
  std::uint64_t seed = 0;
  double train_fraction = 0.7;
  std::string split = "auto";
};

struct SolverOptions {
  double c = 1.0;
  double tolerance = 1e-3;
  std::int64_t max_passes = 1'000'000;
};

struct GridOptions {
  std::vector<double> alpha, k, z, gamma, c;
  std::string metric = "accuracy";
  std::size_t folds = 0;
};

struct Options {
  CommonOptions common;
  KernelOptions kernel;
  DataOptions data;
  SolverOptions solver;
  GridOptions grid;
  std::string family_list = "all";
  std::string model_path;
  std::string manifest_path;
  std::vector<double> bounds{-2.0, 3.0, -1.5, 2.0};
  std::size_t nx = 100;
  std::size_t ny = 100;
  std::size_t resolution = 101;
  double extent = std::numbers::pi;
  std::size_t probes = 20;
  std::size_t mesh_nz = 41;
  std::size_t mesh_nx = 41;
  double z_max = 0.0;
  double angular_factor = 0.0;
  std::vector<double> fractions{0.2, 0.4, 0.6, 0.8, 1.0};
  int repeats = 3;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--out-dir", o.out_dir, "Output directory (default: $METAKERNEL_RUNS_ROOT/<timestamp>-<command>)");
  app->add_option("--threads", o.threads, "Worker threads; results do not depend on it")->capture_default_str();
}

void add_kernel(CLI::App* app, KernelOptions& o, bool with_rbf = true) {
  app->add_option("--family", o.family, with_rbf ? "su2, su11 or rbf" : "su2 or su11")->capture_default_str();
  app->add_option("--alpha", o.alpha, "Deformation strength |alpha|")->capture_default_str();
  app->add_option("--k", o.k, "Representation index k")->capture_default_str();
  app->add_option("--z", o.z, "Scale z")->capture_default_str();
  if (with_rbf) app->add_option("--gamma", o.gamma, "RBF width")->capture_default_str();
}

void add_data(CLI::App* app, DataOptions& o, bool with_split) {
  app->add_option("--dataset", o.dataset, "moons, circles or iris")->capture_default_str();
  app->add_option("--data", o.csv, "CSV file with header f0,...,label (overrides --dataset)");
  app->add_option("--n", o.n, "Sample count for synthetic data")->capture_default_str();
  app->add_option("--noise", o.noise, "Noise level (default 0.3 moons, 0.1 circles)");
  app->add_option("--factor", o.factor, "Inner radius for circles")->capture_default_str();
  app->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  if (with_split) {
    app->add_option("--train-fraction", o.train_fraction, "Training share of the split")->capture_default_str();
    app->add_option("--split", o.split, "auto, stratified or random")->capture_default_str();
  }
}

void add_solver(CLI::App* app, SolverOptions& o, bool with_c) {
  if (with_c) app->add_option("--c", o.c, "Soft-margin penalty C")->capture_default_str();
  app->add_option("--tolerance", o.tolerance, "SMO stopping tolerance")->capture_default_str();
  app->add_option("--max-passes", o.max_passes, "SMO iteration cap")->capture_default_str();
}

void add_grid(CLI::App* app, GridOptions& o) {
  app->add_option("--alpha-grid", o.alpha, "Comma-separated alpha values")->delimiter(',');
  app->add_option("--k-grid", o.k, "Comma-separated k values")->delimiter(',');
  app->add_option("--z-grid", o.z, "Comma-separated z values")->delimiter(',');
  app->add_option("--gamma-grid", o.gamma, "Comma-separated gamma values")->delimiter(',');
  app->add_option("--c-grid", o.c, "Comma-separated C values")->delimiter(',');
  app->add_option("--metric", o.metric, "accuracy or macro_precision")->capture_default_str();
  app->add_option("--folds", o.folds, "k-fold selection on the training split (0: held-out split)")
      ->capture_default_str();
}

json scores_json(const Scores& s) {
  return {{"accuracy", s.accuracy}, {"macro_precision", s.macro_precision}, {"macro_recall", s.macro_recall}};
}

json data_params(const DataOptions& o) {
  json j = {{"train_fraction", o.train_fraction}, {"split", o.split}, {"seed", o.seed}};
  if (o.csv.empty()) {
    j["dataset"] = o.dataset;
    if (o.dataset != "iris") {
      j["n"] = o.n;
      j["noise"] = o.noise;
      if (o.dataset == "circles") j["factor"] = o.factor;
    }
  } else {
    j["data"] = o.csv;
  }
  return j;
}

Dataset load_data(DataOptions& o, RunDirectory& run) {
  Dataset ds;
  if (!o.csv.empty()) {
    const std::string text = read_text_file(o.csv);
    std::istringstream in(text);
    ds = read_csv(in, fs::path(o.csv).stem().string());
    run.params()["data_fnv1a64"] = hex64(fnv1a64(text));
  } else if (o.dataset == "moons") {
    if (o.noise < 0.0) o.noise = 0.3;
    ds = make_moons(o.n, o.noise, o.seed);
  } else if (o.dataset == "circles") {
    if (o.noise < 0.0) o.noise = 0.1;
    ds = make_circles(o.n, o.noise, o.factor, o.seed);
  } else if (o.dataset == "iris") {
    ds = load_iris();
  } else {
    throw InputError("unknown dataset '" + o.dataset + "' (expected moons, circles or iris)");
  }
  run.params()["data"] = data_params(o);
  run.seeds()["data"] = o.seed;
  return ds;
}

bool stratified(const DataOptions& o) {
  if (o.split == "stratified") return true;
  if (o.split == "random") return false;
  if (o.split != "auto") throw InputError("--split must be auto, stratified or random");
  // Synthetic two-class sets are balanced by construction; split them uniformly.
  return !(o.csv.empty() && (o.dataset == "moons" || o.dataset == "circles"));
}

std::uint64_t split_seed(const DataOptions& o) { return o.seed + 1; }
std::uint64_t curve_seed(const DataOptions& o) { return o.seed + 2; }

std::pair<Dataset, Dataset> split_data(const Dataset& ds, const DataOptions& o, RunDirectory& run) {
  const bool strat = stratified(o);
  run.seeds()["split"] = split_seed(o);
  run.params()["data"]["stratified"] = strat;
  return split(ds, o.train_fraction, split_seed(o), strat);
}

TrainConfig train_config(const SolverOptions& o, std::uint64_t seed) {
  TrainConfig config;
  config.c = o.c;
  config.tolerance = o.tolerance;
  config.max_passes = o.max_passes;
  config.seed = seed;
  config.validate();
  return config;
}

json solver_params(const SolverOptions& o, bool with_c) {
  json j = {{"tolerance", o.tolerance}, {"max_passes", o.max_passes}};
  if (with_c) j["c"] = o.c;
  return j;
}

GridSpec grid_spec(Family family, const GridOptions& o) {
  GridSpec spec = GridSpec::defaults(family);
  if (!o.c.empty()) spec.c = o.c;
  if (family == Family::Rbf) {
    if (!o.gamma.empty()) spec.gamma = o.gamma;
  } else {
    if (!o.alpha.empty()) spec.alpha = o.alpha;
    if (!o.k.empty()) spec.k = o.k;
    if (!o.z.empty()) spec.z = o.z;
  }
  spec.metric = parse_metric(o.metric);
  spec.validate();
  return spec;
}

TuneResult tune(const Dataset& train, const Dataset& test, const GridSpec& spec, const GridOptions& o,
                const TrainConfig& config, std::uint64_t seed, unsigned threads) {
  if (o.folds >= 2) return grid_search_kfold(train, spec, config, o.folds, seed, threads);
  return grid_search(train, test, spec, config, threads);
}

std::vector<Family> families_from(const std::string& list) {
  if (list == "all") return {Family::AlphaSU2, Family::AlphaSU11, Family::Rbf};
  std::vector<Family> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    out.push_back(parse_family(std::string_view(list).substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

std::string prefixed(std::string_view file, Family family) {
  const auto dot = file.find('.');
  return std::string(file.substr(0, dot)) + "_" + std::string(family_name(family)) + std::string(file.substr(dot));
}

// ---------------------------------------------------------------------------
// Commands

void cmd_data_gen(Options& opt, RunDirectory& run, std::ostream& out) {
  if (!opt.data.csv.empty() || opt.data.dataset == "iris") throw InputError("data gen: use moons or circles");
  const Dataset ds = load_data(opt.data, run);
  run.write("data.csv", to_csv(ds));
  out << "generated " << ds.size() << " " << ds.name << " samples\n";
}

void cmd_data_load(Options& opt, RunDirectory& run, std::ostream& out) {
  if (opt.data.csv.empty() && opt.data.dataset != "iris") {
    throw InputError("data load: give --data <csv> or --dataset iris");
  }
  const Dataset ds = load_data(opt.data, run);
  run.write("data.csv", to_csv(ds));
  out << "loaded " << ds.size() << " samples, " << ds.dimension() << " features, " << ds.num_classes()
      << " classes\n";
}

void cmd_kernel_shape(Options& opt, RunDirectory& run, std::ostream& out) {
  const KernelParams p = opt.kernel.params();
  if (opt.resolution < 1) throw InputError("kernel shape: --resolution must be >= 1");
  if (!(opt.extent > 0.0)) throw InputError("kernel shape: --extent must be positive");
  run.params()["kernel"] = to_json(p);
  run.params()["resolution"] = opt.resolution;
  run.params()["extent"] = opt.extent;

  const Kernel kern(p);
  const std::array<double, 2> origin{0.0, 0.0};
  const std::size_t n = opt.resolution;
  auto coord = [&](std::size_t i) {
    // Written so that coord(n - 1 - i) == -coord(i) exactly.
    return n == 1 ? 0.0
                  : opt.extent * (2.0 * static_cast<double>(i) - static_cast<double>(n - 1)) /
                        static_cast<double>(n - 1);
  };
  std::ostringstream csv;
  csv << "row,col,x1,x2,value\n";
  double peak = -INFINITY;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const std::array<double, 2> point{coord(c), coord(r)};
      const double v = kern.real(origin, point);
      if (!std::isfinite(v)) throw NumericalError("kernel shape: non-finite value at " + std::to_string(r) + "," +
                                                  std::to_string(c));
      peak = std::max(peak, v);
      csv << r << ',' << c << ',' << format_double(point[0]) << ',' << format_double(point[1]) << ','
          << format_double(v) << '\n';
    }
  }
  run.write("kernel_shape.csv", csv.str());
  out << describe(p) << ": " << n << "x" << n << " grid, peak " << format_double(peak) << "\n";
}

void cmd_train(Options& opt, RunDirectory& run, std::ostream& out) {
  const KernelParams p = opt.kernel.params();
  const Dataset ds = load_data(opt.data, run);
  const TrainConfig config = train_config(opt.solver, opt.data.seed);
  run.params()["kernel"] = to_json(p);
  run.params()["solver"] = solver_params(opt.solver, true);
  run.seeds()["solver"] = config.seed;

  Dataset train = ds, test;
  const bool has_test = opt.data.train_fraction < 1.0;
  if (has_test) std::tie(train, test) = split_data(ds, opt.data, run);
  const EvaluationResult result = fit_and_evaluate(train, has_test ? test : train, p, config, opt.common.threads);

  json metrics = {{"kernel", to_json(p)}, {"c", config.c}, {"train", scores_json(result.train)}};
  if (has_test) metrics["test"] = scores_json(result.test);
  json sv = json::array();
  for (const auto& m : result.model.machines) sv.push_back(m.support_vectors.rows());
  metrics["support_vectors"] = sv;

  run.write("model.json", model_to_json(result.model).dump(2) + "\n");
  run.write("train.csv", to_csv(train));
  if (has_test) run.write("test.csv", to_csv(test));
  run.write("metrics.json", metrics.dump(2) + "\n");
  out << describe(p) << ", C = " << format_double(config.c) << ": train accuracy "
      << format_double(result.train.accuracy);
  if (has_test) out << ", test accuracy " << format_double(result.test.accuracy);
  out << "\n";
}

void cmd_evaluate(Options& opt, RunDirectory& run, std::ostream& out) {
  if (opt.model_path.empty()) throw InputError("evaluate: --model is required");
  const std::string model_text = read_text_file(opt.model_path);
  const SvmModel model = load_model(opt.model_path);
  run.params()["model"] = opt.model_path;
  run.params()["model_fnv1a64"] = hex64(fnv1a64(model_text));
  const Dataset ds = load_data(opt.data, run);
  const auto predicted = model.predict(ds.features);
  const Scores s = score(ds.labels, predicted);

  std::ostringstream csv;
  csv << "index,label,predicted\n";
  for (std::size_t i = 0; i < predicted.size(); ++i) csv << i << ',' << ds.labels[i] << ',' << predicted[i] << '\n';
  run.write("predictions.csv", csv.str());
  run.write("metrics.json", json{{"samples", ds.size()}, {"scores", scores_json(s)}}.dump(2) + "\n");
  out << "accuracy " << format_double(s.accuracy) << " on " << ds.size() << " samples\n";
}

void cmd_grid_search(Options& opt, RunDirectory& run, std::ostream& out) {
  const Family family = parse_family(opt.kernel.family);
  const GridSpec spec = grid_spec(family, opt.grid);
  const Dataset ds = load_data(opt.data, run);
  const auto [train, test] = split_data(ds, opt.data, run);
  const TrainConfig config = train_config(opt.solver, opt.data.seed);
  run.params()["solver"] = solver_params(opt.solver, false);
  run.params()["folds"] = opt.grid.folds;
  run.seeds()["solver"] = config.seed;
  if (opt.grid.folds >= 2) run.seeds()["folds"] = split_seed(opt.data);

  const TuneResult result = tune(train, test, spec, opt.grid, config, split_seed(opt.data), opt.common.threads);
  run.write("grid.csv", grid_table_csv(result));
  run.write("timing.csv", grid_timing_csv(result), false);
  json summary = tune_summary_json(result, spec);
  summary["selection"] = opt.grid.folds >= 2 ? "k-fold on the training split" : "held-out split";
  run.write("summary.json", summary.dump(2) + "\n");
  run.params()["grid"] = summary["grid"];
  out << spec.cell_count() << " cells; best " << describe(result.best.params) << ", C = "
      << format_double(result.best.c) << ", " << metric_name(result.metric) << " "
      << format_double(result.best_score) << "\n";
}

void cmd_experiment(Options& opt, RunDirectory& run, std::ostream& out) {
  const auto families = families_from(opt.family_list);
  const Dataset ds = load_data(opt.data, run);
  const auto [train, test] = split_data(ds, opt.data, run);
  const TrainConfig base = train_config(opt.solver, opt.data.seed);
  const bool strat = stratified(opt.data);
  run.params()["families"] = opt.family_list;
  run.params()["solver"] = solver_params(opt.solver, false);
  run.params()["folds"] = opt.grid.folds;
  run.params()["learning_curve"] = {{"fractions", opt.fractions}, {"repeats", opt.repeats}};
  run.seeds()["solver"] = base.seed;
  run.seeds()["learning_curve"] = curve_seed(opt.data);
  run.write("train.csv", to_csv(train));
  run.write("test.csv", to_csv(test));

  struct Row {
    Family family;
    std::optional<GridCell> best;
    Scores train, test;
    std::string error;
  };
  std::vector<Row> rows;
  json per_family = json::object();
  for (Family family : families) {
    Row row{family, std::nullopt, {}, {}, {}};
    const std::string name(family_name(family));
    try {
      const GridSpec spec = grid_spec(family, opt.grid);
      const TuneResult result = tune(train, test, spec, opt.grid, base, split_seed(opt.data), opt.common.threads);
      run.write(prefixed("grid.csv", family), grid_table_csv(result));
      run.write(prefixed("timing.csv", family), grid_timing_csv(result), false);

      TrainConfig config = base;
      config.c = result.best.c;
      const EvaluationResult final_fit = fit_and_evaluate(train, test, result.best.params, config, opt.common.threads);
      run.write(prefixed("model.json", family), model_to_json(final_fit.model).dump(2) + "\n");

      LearningCurveOptions lc;
      lc.holdout_fraction = 1.0 - opt.data.train_fraction;
      lc.stratified = strat;
      const auto curve = learning_curve(ds, result.best.params, config, opt.fractions, opt.repeats,
                                        curve_seed(opt.data), lc);
      run.write(prefixed("learning_curve.csv", family), learning_curve_csv(curve));

      row.best = result.best;
      row.train = final_fit.train;
      row.test = final_fit.test;
      per_family[name] = tune_summary_json(result, spec);
      out << name << ": " << describe(result.best.params) << ", C = " << format_double(result.best.c)
          << ", test accuracy " << format_double(row.test.accuracy) << "\n";
    } catch (const Error& e) {
      row.error = e.what();
      per_family[name] = {{"error", row.error}};
      run.warn(name + ": " + row.error);
      out << name << ": failed: " << row.error << "\n";
    }
    rows.push_back(std::move(row));
  }

  std::optional<double> rbf_accuracy;
  for (const auto& r : rows) {
    if (r.family == Family::Rbf && r.best) rbf_accuracy = r.test.accuracy;
  }
  std::ostringstream report;
  report << "dataset,family,alpha,k,z,gamma,c,train_accuracy,test_accuracy,test_macro_precision,"
            "test_macro_recall,abs_diff_vs_rbf,error\n";
  for (const auto& r : rows) {
    report << ds.name << ',' << family_name(r.family) << ',';
    if (r.best) {
      const auto& p = r.best->params;
      // Only the parameters the family actually uses are filled in.
      if (p.family == Family::Rbf) {
        report << ",,," << format_double(p.gamma);
      } else {
        report << format_double(p.alpha) << ',' << format_double(p.k) << ',' << format_double(p.z) << ',';
      }
      report << ',' << format_double(r.best->c) << ',' << format_double(r.train.accuracy)
             << ',' << format_double(r.test.accuracy) << ',' << format_double(r.test.macro_precision) << ','
             << format_double(r.test.macro_recall) << ',';
      if (rbf_accuracy) report << format_double(std::abs(r.test.accuracy - *rbf_accuracy));
      report << ",\n";
    } else {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      report << ",,,,,,,,,," << msg << '\n';
    }
  }
  run.write("report.csv", report.str());

  const json summary = {{"dataset",
                         {{"name", ds.name},
                          {"size", ds.size()},
                          {"dimension", ds.dimension()},
                          {"classes", ds.num_classes()},
                          {"train_size", train.size()},
                          {"test_size", test.size()},
                          {"stratified", strat}}},
                        {"selection", opt.grid.folds >= 2 ? "k-fold on the training split"
                                                          : "held-out split (selection and report share it)"},
                        {"families", per_family}};
  run.write("summary.json", summary.dump(2) + "\n");
  bool any_ok = false;
  for (const auto& r : rows) any_ok |= r.best.has_value();
  if (!any_ok) throw NumericalError("experiment: every family failed");
}

void cmd_boundary(Options& opt, RunDirectory& run, std::ostream& out) {
  if (opt.model_path.empty()) throw InputError("boundary: --model is required");
  if (opt.bounds.size() != 4) throw InputError("boundary: --bounds takes xmin,xmax,ymin,ymax");
  const std::string model_text = read_text_file(opt.model_path);
  const SvmModel model = load_model(opt.model_path);
  run.params()["model"] = opt.model_path;
  run.params()["model_fnv1a64"] = hex64(fnv1a64(model_text));
  run.params()["bounds"] = opt.bounds;
  run.params()["resolution"] = {opt.nx, opt.ny};
  const auto grid =
      decision_grid(model, {opt.bounds[0], opt.bounds[1], opt.bounds[2], opt.bounds[3]}, {opt.nx, opt.ny});
  std::ostringstream csv;
  write_decision_grid_csv(csv, grid);
  run.write("boundary.csv", csv.str());
  out << "decision grid " << opt.nx << "x" << opt.ny << "\n";
}

// Returns false when the finite-difference check misses the closed form.
bool cmd_geometry(Options& opt, RunDirectory& run, std::ostream& out) {
  const KernelParams p = opt.kernel.params();
  if (p.family == Family::Rbf) throw DomainError("geometry: the rbf family is flat; use su2 or su11");
  run.params()["kernel"] = to_json(p);
  run.params()["probes"] = opt.probes;
  run.params()["resolution"] = {opt.mesh_nz, opt.mesh_nx};
  run.seeds()["probes"] = opt.data.seed;

  const double expected = (p.family == Family::AlphaSU2 ? 4.0 : -4.0) / p.k;
  std::ostringstream csv;
  csv << "probe,z,method,ricci_zz,ricci_xx,ricci_scalar,expected_scalar,abs_error\n";
  double worst = 0.0;
  const auto zs = probe_points(p, opt.probes, opt.data.seed);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    for (CurvatureMethod method : {CurvatureMethod::ClosedForm, CurvatureMethod::FiniteDifference}) {
      const auto r = curvature(zs[i], p, method);
      const double err = std::abs(r.ricci_scalar - expected);
      if (method == CurvatureMethod::FiniteDifference) worst = std::max(worst, err);
      csv << i << ',' << format_double(zs[i]) << ','
          << (method == CurvatureMethod::ClosedForm ? "closed_form" : "finite_difference") << ','
          << format_double(r.ricci_zz) << ',' << format_double(r.ricci_xx) << ',' << format_double(r.ricci_scalar)
          << ',' << format_double(expected) << ',' << format_double(err) << '\n';
    }
  }
  run.write("curvature.csv", csv.str());

  const double rate = std::sqrt(2.0 * p.alpha);
  double z_max = opt.z_max;
  if (!(z_max > 0.0)) z_max = (p.family == Family::AlphaSU2 ? std::numbers::pi : 2.0) / rate;
  run.params()["z_max"] = z_max;
  std::optional<double> factor;
  if (opt.angular_factor > 0.0) factor = opt.angular_factor;
  const auto mesh = revolution_surface_mesh(p, {0.0, z_max}, {-std::numbers::pi, std::numbers::pi},
                                            {opt.mesh_nz, opt.mesh_nx}, factor);
  std::ostringstream mesh_csv, mesh_obj;
  write_mesh_csv(mesh_csv, mesh);
  write_mesh_obj(mesh_obj, mesh);
  run.write("mesh.csv", mesh_csv.str());
  run.write("mesh.obj", mesh_obj.str());
  for (const auto& w : mesh.warnings) run.warn(w);

  const bool pass = worst <= 1e-4;
  const json report = {{"kernel", to_json(p)},
                       {"closed_form_ricci_scalar", expected},
                       {"finite_difference_max_abs_error", worst},
                       {"tolerance", 1e-4},
                       {"pass", pass},
                       {"probes", opt.probes},
                       {"mesh",
                        {{"nz", mesh.nz},
                         {"nx", mesh.nx},
                         {"z_range", {mesh.z_values.front(), mesh.z_values.back()}},
                         {"angular_factor", mesh.angular_factor},
                         {"warnings", mesh.warnings}}}};
  run.write("report.json", report.dump(2) + "\n");
  out << describe(p) << ": R = " << format_double(expected) << ", finite-difference max error "
      << format_double(worst) << (pass ? " (ok)" : " (FAILED)") << "\n";
  if (mesh.angular_factor != 1.0) {
    out << "mesh: revolution angle scaled by " << format_double(mesh.angular_factor)
        << " so the profile embeds in 3-space\n";
  }
  for (const auto& w : mesh.warnings) out << "mesh: " << w << "\n";
  return pass;
}

int cmd_report(const Options& opt, std::ostream& out) {
  const fs::path dir = fs::is_directory(opt.manifest_path) ? fs::path(opt.manifest_path)
                                                            : fs::path(opt.manifest_path).parent_path();
  const json manifest = read_manifest(dir);
  out << manifest.value("command", "?") << " (metakernel " << manifest.value("version", "?") << ", "
      << manifest.value("wall_seconds", 0.0) << " s)\n";
  for (const auto& a : manifest.at("artifacts")) {
    out << "  " << a.at("file").get<std::string>() << "  " << a.at("fnv1a64").get<std::string>() << "\n";
  }
  for (const auto& w : manifest.value("warnings", json::array())) out << "  warning: " << w.get<std::string>() << "\n";
  if (fs::exists(dir / "report.csv")) out << read_text_file(dir / "report.csv");
  return kExitOk;
}

int execute(const std::string& command, const Options& opt, const std::vector<std::string>& args,
            std::ostream& out, const std::function<int(RunDirectory&)>& body) {
  const auto start = Clock::now();
  const fs::path dir = opt.common.out_dir.empty() ? default_run_dir(command) : fs::path(opt.common.out_dir);
  RunDirectory run(dir, command, without_out_dir(args));
  int code = kExitOk;
  try {
    code = body(run);
  } catch (const InputError&) {
    run.finish(std::chrono::duration<double>(Clock::now() - start).count(), kExitInput);
    throw;
  } catch (const NumericalError&) {
    run.finish(std::chrono::duration<double>(Clock::now() - start).count(), kExitNumerical);
    throw;
  } catch (const IoError&) {
    run.finish(std::chrono::duration<double>(Clock::now() - start).count(), kExitIo);
    throw;
  } catch (...) {
    run.finish(std::chrono::duration<double>(Clock::now() - start).count(), kExitFailure);
    throw;
  }
  run.finish(std::chrono::duration<double>(Clock::now() - start).count(), code);
  out << "output: " << run.path().string() << "\n";
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Deformed Weyl-Heisenberg kernels for support vector machines", "metakernel"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* data = app.add_subcommand("data", "Generate or load datasets")->require_subcommand(1);
  auto* data_gen = data->add_subcommand("gen", "Generate moons or circles");
  add_data(data_gen, opt.data, false);
  add_common(data_gen, opt.common);
  auto* data_load = data->add_subcommand("load", "Load iris or a CSV file");
  add_data(data_load, opt.data, false);
  add_common(data_load, opt.common);

  auto* kernel = app.add_subcommand("kernel", "Kernel inspection")->require_subcommand(1);
  auto* shape = kernel->add_subcommand("shape", "Re K((0,0), x') over a square grid");
  add_kernel(shape, opt.kernel);
  shape->add_option("--resolution", opt.resolution, "Points per axis")->capture_default_str();
  shape->add_option("--extent", opt.extent, "Half-width of the grid")->capture_default_str();
  add_common(shape, opt.common);

  auto* train = app.add_subcommand("train", "Train one model");
  add_kernel(train, opt.kernel);
  add_data(train, opt.data, true);
  add_solver(train, opt.solver, true);
  add_common(train, opt.common);

  auto* evaluate = app.add_subcommand("evaluate", "Score a saved model");
  evaluate->add_option("--model", opt.model_path, "model.json")->required();
  add_data(evaluate, opt.data, false);
  add_common(evaluate, opt.common);

  auto* grid = app.add_subcommand("grid-search", "Exhaustive hyperparameter search for one family");
  grid->add_option("--family", opt.kernel.family, "su2, su11 or rbf")->capture_default_str();
  add_data(grid, opt.data, true);
  add_grid(grid, opt.grid);
  add_solver(grid, opt.solver, false);
  add_common(grid, opt.common);

  auto* experiment = app.add_subcommand("experiment", "Grid search, final fit and learning curve per family");
  experiment->add_option("--family", opt.family_list, "all or a comma-separated family list")->capture_default_str();
  add_data(experiment, opt.data, true);
  add_grid(experiment, opt.grid);
  add_solver(experiment, opt.solver, false);
  experiment->add_option("--fractions", opt.fractions, "Learning-curve training fractions")->delimiter(',');
  experiment->add_option("--repeats", opt.repeats, "Learning-curve repeats")->capture_default_str();
  add_common(experiment, opt.common);

  auto* boundary = app.add_subcommand("boundary", "Decision values over a 2-D grid");
  boundary->add_option("--model", opt.model_path, "model.json")->required();
  boundary->add_option("--bounds", opt.bounds, "xmin,xmax,ymin,ymax")->delimiter(',');
  boundary->add_option("--nx", opt.nx, "Grid points along x")->capture_default_str();
  boundary->add_option("--ny", opt.ny, "Grid points along y")->capture_default_str();
  add_common(boundary, opt.common);

  auto* geometry = app.add_subcommand("geometry", "Curvature check and surface-of-revolution mesh");
  add_kernel(geometry, opt.kernel, false);
  geometry->add_option("--probes", opt.probes, "Probe points")->capture_default_str();
  geometry->add_option("--seed", opt.data.seed, "Probe seed")->capture_default_str();
  geometry->add_option("--nz", opt.mesh_nz, "Mesh rows along z")->capture_default_str();
  geometry->add_option("--nx", opt.mesh_nx, "Mesh columns along x")->capture_default_str();
  geometry->add_option("--z-max", opt.z_max, "Upper end of the mesh z range (default: family-specific)");
  geometry->add_option("--angular-factor", opt.angular_factor, "Fixed revolution angle scale (default: automatic)");
  add_common(geometry, opt.common);

  auto* rerun = app.add_subcommand("rerun", "Replay the command recorded in a manifest");
  rerun->add_option("manifest", opt.manifest_path, "manifest.json or its directory")->required();
  rerun->add_option("--out-dir", opt.common.out_dir, "Output directory for the replay");

  auto* report = app.add_subcommand("report", "Summarise a run directory");
  report->add_option("run", opt.manifest_path, "Run directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }
  try {
    auto simple = [&](const std::string& name, void (*body)(Options&, RunDirectory&, std::ostream&)) {
      return execute(name, opt, args, out, [&](RunDirectory& run) {
        body(opt, run, out);
        return static_cast<int>(kExitOk);
      });
    };
    if (*data_gen) return simple("data-gen", cmd_data_gen);
    if (*data_load) return simple("data-load", cmd_data_load);
    if (*shape) return simple("kernel-shape", cmd_kernel_shape);
    if (*train) return simple("train", cmd_train);
    if (*evaluate) return simple("evaluate", cmd_evaluate);
    if (*grid) return simple("grid-search", cmd_grid_search);
    if (*experiment) return simple("experiment", cmd_experiment);
    if (*boundary) return simple("boundary", cmd_boundary);
    if (*geometry) {
      return execute("geometry", opt, args, out, [&](RunDirectory& run) {
        return cmd_geometry(opt, run, out) ? static_cast<int>(kExitOk) : static_cast<int>(kExitNumerical);
      });
    }
    if (*report) return cmd_report(opt, out);
    if (*rerun) {
      const json manifest = read_manifest(opt.manifest_path);
      if (manifest.value("tool", "") != "metakernel") throw InputError("rerun: not a metakernel manifest");
      if (manifest.value("version", "") != kVersion) {
        err << "warning: manifest was written by metakernel " << manifest.value("version", "?") << "\n";
      }
      auto replay = manifest.at("argv").get<std::vector<std::string>>();
      if (!replay.empty() && replay.front() == "rerun") throw InputError("rerun: manifest records a rerun");
      if (!opt.common.out_dir.empty()) {
        replay.push_back("--out-dir");
        replay.push_back(opt.common.out_dir);
      }
      return run(replay, out, err);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace metakernel::cli
