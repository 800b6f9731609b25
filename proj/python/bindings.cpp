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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "metakernel/coherent_states.hpp"
#include "metakernel/datasets.hpp"
#include "metakernel/error.hpp"
#include "metakernel/geometry.hpp"
#include "metakernel/kernels.hpp"
#include "metakernel/serialization.hpp"
#include "metakernel/svm.hpp"
#include "metakernel/tuning.hpp"
#include "metakernel/version.hpp"

namespace py = pybind11;
using namespace metakernel;

namespace {

py::dict scores_dict(const Scores& s) {
  py::dict d;
  d["accuracy"] = s.accuracy;
  d["macro_precision"] = s.macro_precision;
  d["macro_recall"] = s.macro_recall;
  return d;
}

Dataset make_dataset(const RowMatrix& features, std::vector<int> labels, std::string name) {
  Dataset ds;
  ds.features = features;
  ds.labels = std::move(labels);
  ds.name = std::move(name);
  ds.validate();
  return ds;
}

CurvatureMethod parse_method(const std::string& name) {
  if (name == "closed_form") return CurvatureMethod::ClosedForm;
  if (name == "finite_difference") return CurvatureMethod::FiniteDifference;
  throw InputError("method must be 'closed_form' or 'finite_difference'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Deformed Weyl-Heisenberg kernels, SMO support vector machines and feature-space geometry";
  m.attr("__version__") = kVersion;

  // Base first: pybind11 tries translators newest-first, so subclasses win.
  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto input_error = py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  auto domain_error = py::register_exception<DomainError>(m, "DomainError", input_error.ptr());
  py::register_exception<PoleError>(m, "PoleError", domain_error.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  (void)error;

  py::enum_<Family>(m, "Family")
      .value("SU2", Family::AlphaSU2)
      .value("SU11", Family::AlphaSU11)
      .value("RBF", Family::Rbf);
  m.def("parse_family", [](const std::string& s) { return parse_family(s); });

  py::class_<KernelParams>(m, "KernelParams")
      .def(py::init([](Family family, double alpha, double k, double z, double gamma) {
             const KernelParams p{family, alpha, k, z, gamma};
             p.validate();
             return p;
           }),
           py::arg("family"), py::arg("alpha") = 0.5, py::arg("k") = 1.0, py::arg("z") = 1.0,
           py::arg("gamma") = 1.0)
      .def_static("su2", &KernelParams::su2, py::arg("alpha"), py::arg("k"), py::arg("z"))
      .def_static("su11", &KernelParams::su11, py::arg("alpha"), py::arg("k"), py::arg("z"))
      .def_static("rbf", &KernelParams::rbf, py::arg("gamma"))
      .def_readwrite("family", &KernelParams::family)
      .def_readwrite("alpha", &KernelParams::alpha)
      .def_readwrite("k", &KernelParams::k)
      .def_readwrite("z", &KernelParams::z)
      .def_readwrite("gamma", &KernelParams::gamma)
      .def("validate", &KernelParams::validate)
      .def("angle", &KernelParams::angle)
      .def(py::self == py::self)
      .def("__repr__", [](const KernelParams& p) { return describe(p); });

  m.def("su2_kernel_1d", &su2_kernel_1d, py::arg("delta"), py::arg("params"));
  m.def("su11_kernel_1d", &su11_kernel_1d, py::arg("delta"), py::arg("params"));
  m.def("contraction_limit_kernel", &contraction_limit_kernel, py::arg("delta"), py::arg("lambda_sq"));
  m.def(
      "kernel",
      [](const std::vector<double>& x, const std::vector<double>& xp, const KernelParams& p) {
        return Kernel(p)(x, xp);
      },
      py::arg("x"), py::arg("xp"), py::arg("params"));
  m.def(
      "gram",
      [](const RowMatrix& xs, const KernelParams& p, unsigned threads) {
        auto g = gram(xs, p, threads);
        return py::make_tuple(g.complex_entries, g.real_entries);
      },
      py::arg("xs"), py::arg("params"), py::arg("threads") = 1,
      "Returns (complex Gram, real Gram used by the SVM).");
  m.def("cross_gram", &cross_gram_real, py::arg("a"), py::arg("b"), py::arg("params"));

  py::class_<CoherentState>(m, "CoherentState")
      .def_readonly("coefficients", &CoherentState::coefficients)
      .def_readonly("truncation_tail", &CoherentState::truncation_tail)
      .def("norm_squared", &CoherentState::norm_squared);
  m.def("coherent_state", &build_state, py::arg("x"), py::arg("params"));
  m.def("overlap", &overlap, py::arg("a"), py::arg("b"));

  m.def(
      "metric",
      [](double z, const KernelParams& p) {
        const auto g = metric_at(z, p);
        return py::make_tuple(g.g_zz, g.g_xx);
      },
      py::arg("z"), py::arg("params"), "(g_zz, g_xx) at coordinate z.");
  m.def(
      "christoffel",
      [](double z, const KernelParams& p, const std::string& method) {
        const auto c = parse_method(method) == CurvatureMethod::ClosedForm ? christoffel_closed_form(z, p)
                                                                            : christoffel_finite_difference(z, p);
        return py::make_tuple(c.gamma_x_xz, c.gamma_z_xx);
      },
      py::arg("z"), py::arg("params"), py::arg("method") = "closed_form");
  m.def(
      "curvature",
      [](double z, const KernelParams& p, const std::string& method) {
        const auto r = curvature(z, p, parse_method(method));
        py::dict d;
        d["ricci_zz"] = r.ricci_zz;
        d["ricci_xx"] = r.ricci_xx;
        d["ricci_scalar"] = r.ricci_scalar;
        return d;
      },
      py::arg("z"), py::arg("params"), py::arg("method") = "closed_form");
  m.def("probe_points", &probe_points, py::arg("params"), py::arg("count"), py::arg("seed"));
  m.def(
      "surface_mesh",
      [](const KernelParams& p, std::pair<double, double> z_range, std::pair<double, double> x_range,
         std::pair<std::size_t, std::size_t> resolution, std::optional<double> angular_factor) {
        const auto mesh = revolution_surface_mesh(p, z_range, x_range, resolution, angular_factor);
        Eigen::MatrixXd vertices(static_cast<Eigen::Index>(mesh.vertices.size()), 3);
        for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
          for (int j = 0; j < 3; ++j) vertices(static_cast<Eigen::Index>(i), j) = mesh.vertices[i][static_cast<std::size_t>(j)];
        py::dict d;
        d["vertices"] = vertices;
        d["shape"] = py::make_tuple(mesh.nz, mesh.nx);
        d["z"] = mesh.z_values;
        d["x"] = mesh.x_values;
        d["angular_factor"] = mesh.angular_factor;
        d["warnings"] = mesh.warnings;
        return d;
      },
      py::arg("params"), py::arg("z_range"), py::arg("x_range"), py::arg("resolution"),
      py::arg("angular_factor") = py::none());

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("features"), py::arg("labels"), py::arg("name") = "data")
      .def_readonly("features", &Dataset::features)
      .def_readonly("labels", &Dataset::labels)
      .def_readonly("name", &Dataset::name)
      .def("__len__", &Dataset::size)
      .def("num_classes", &Dataset::num_classes)
      .def("to_csv", [](const Dataset& ds) { return to_csv(ds); });
  m.def("make_moons", &make_moons, py::arg("n") = 1000, py::arg("noise") = 0.3, py::arg("seed") = 0);
  m.def("make_circles", &make_circles, py::arg("n") = 1000, py::arg("noise") = 0.1, py::arg("factor") = 0.5,
        py::arg("seed") = 0);
  m.def("load_iris", &load_iris);
  m.def("split", &split, py::arg("dataset"), py::arg("train_fraction") = 0.7, py::arg("seed") = 0,
        py::arg("stratified") = true);

  py::class_<Scaler>(m, "Scaler")
      .def_readonly("min", &Scaler::min)
      .def_readonly("max", &Scaler::max)
      .def("transform", py::overload_cast<const RowMatrix&>(&Scaler::transform, py::const_))
      .def("inverse_transform", &Scaler::inverse_transform);
  m.def("fit_scaler", &fit_scaler, py::arg("train"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init([](double c, double tolerance, std::int64_t max_passes, std::uint64_t seed) {
             TrainConfig t{c, tolerance, max_passes, seed};
             t.validate();
             return t;
           }),
           py::arg("c") = 1.0, py::arg("tolerance") = 1e-3, py::arg("max_passes") = 1'000'000,
           py::arg("seed") = 0)
      .def_readwrite("c", &TrainConfig::c)
      .def_readwrite("tolerance", &TrainConfig::tolerance)
      .def_readwrite("max_passes", &TrainConfig::max_passes)
      .def_readwrite("seed", &TrainConfig::seed);

  py::class_<BinarySolution>(m, "BinarySolution")
      .def_readonly("alpha", &BinarySolution::alpha)
      .def_readonly("bias", &BinarySolution::bias)
      .def_readonly("dual_objective", &BinarySolution::dual_objective)
      .def_readonly("iterations", &BinarySolution::iterations)
      .def_readonly("converged", &BinarySolution::converged);
  m.def(
      "train_binary",
      [](const Eigen::MatrixXd& gram_real, const std::vector<int>& labels, const TrainConfig& config) {
        return train_binary(gram_real, labels, config);
      },
      py::arg("gram"), py::arg("labels"), py::arg("config") = TrainConfig{});
  m.def(
      "verify_kkt",
      [](const Eigen::MatrixXd& gram_real, const std::vector<int>& labels, const std::vector<double>& alpha,
         double bias, double c, double tolerance) {
        const auto r = verify_kkt(gram_real, labels, alpha, bias, c, tolerance);
        py::dict d;
        d["ok"] = r.ok;
        d["box_feasible"] = r.box_feasible;
        d["equality_residual"] = r.equality_residual;
        d["max_violation"] = r.max_violation;
        return d;
      },
      py::arg("gram"), py::arg("labels"), py::arg("alpha"), py::arg("bias"), py::arg("c"),
      py::arg("tolerance") = 1e-3);

  py::class_<SvmModel>(m, "SvmModel")
      .def_readonly("kernel_params", &SvmModel::kernel_params)
      .def_readonly("c", &SvmModel::c)
      .def_readonly("classes", &SvmModel::classes)
      .def("predict", py::overload_cast<const RowMatrix&>(&SvmModel::predict, py::const_), py::arg("xs"))
      .def(
          "decision_values",
          [](const SvmModel& model, const std::vector<double>& x) { return model.decision_values(x); },
          py::arg("x"))
      .def("to_json", [](const SvmModel& model) { return model_to_json(model).dump(); })
      .def_static(
          "from_json", [](const std::string& text) { return model_from_json(nlohmann::json::parse(text)); },
          py::arg("text"))
      .def("save", [](const SvmModel& model, const std::filesystem::path& p) { save_model(p, model); })
      .def_static("load", &load_model, py::arg("path"));
  m.def(
      "train",
      [](const RowMatrix& xs, const std::vector<int>& labels, const KernelParams& p, const TrainConfig& config,
         unsigned threads) { return train_multiclass(xs, labels, p, config, threads); },
      py::arg("xs"), py::arg("labels"), py::arg("params"), py::arg("config") = TrainConfig{}, py::arg("threads") = 1,
      "Trains on already-scaled features; see fit_and_evaluate for the scaled pipeline.");
  m.def(
      "fit_and_evaluate",
      [](const Dataset& train, const Dataset& test, const KernelParams& p, const TrainConfig& config) {
        auto r = fit_and_evaluate(train, test, p, config);
        return py::make_tuple(r.model, scores_dict(r.train), scores_dict(r.test));
      },
      py::arg("train"), py::arg("test"), py::arg("params"), py::arg("config") = TrainConfig{},
      "Returns (model, train_scores, test_scores).");

  m.def(
      "grid_search",
      [](const Dataset& train, const Dataset& eval, Family family, py::dict overrides, const std::string& metric,
         const TrainConfig& config, unsigned threads) {
        GridSpec spec = GridSpec::defaults(family);
        spec.metric = parse_metric(metric);
        for (auto [key, value] : overrides) {
          const auto name = key.cast<std::string>();
          const auto values = value.cast<std::vector<double>>();
          if (name == "alpha") spec.alpha = values;
          else if (name == "k") spec.k = values;
          else if (name == "z") spec.z = values;
          else if (name == "gamma") spec.gamma = values;
          else if (name == "c") spec.c = values;
          else throw InputError("unknown grid axis '" + name + "'");
        }
        const auto result = grid_search(train, eval, spec, config, threads);
        py::dict d;
        d["best_params"] = result.best.params;
        d["best_c"] = result.best.c;
        d["best_score"] = result.best_score;
        d["table_csv"] = grid_table_csv(result);
        d["cells"] = result.table.size();
        return d;
      },
      py::arg("train"), py::arg("eval"), py::arg("family"), py::arg("grid") = py::dict(),
      py::arg("metric") = "accuracy", py::arg("config") = TrainConfig{}, py::arg("threads") = 1);
  m.def(
      "learning_curve",
      [](const Dataset& ds, const KernelParams& p, const TrainConfig& config, const std::vector<double>& fractions,
         int repeats, std::uint64_t seed) {
        py::list rows;
        for (const auto& r : learning_curve(ds, p, config, fractions, repeats, seed)) {
          py::dict d;
          d["fraction"] = r.fraction;
          d["train_size"] = r.train_size;
          d["train_mean"] = r.train_mean;
          d["train_std"] = r.train_std;
          d["test_mean"] = r.test_mean;
          d["test_std"] = r.test_std;
          rows.append(d);
        }
        return rows;
      },
      py::arg("dataset"), py::arg("params"), py::arg("config"), py::arg("fractions"), py::arg("repeats") = 1,
      py::arg("seed") = 0);
}
