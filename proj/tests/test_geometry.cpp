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
#include <numbers>
#include <sstream>

#include "metakernel/error.hpp"
#include "metakernel/geometry.hpp"

namespace metakernel {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Metric, DirectSubstitution) {
  const auto g = metric_at(kPi / 4.0, KernelParams::su2(2.0, 1.0, 1.0));
  EXPECT_NEAR(g.g_zz, 2.0, 1e-15);
  EXPECT_NEAR(g.g_xx, 0.5, 1e-15);

  const auto h = metric_at(1.0, KernelParams::su11(2.0, 2.0, 1.0));
  EXPECT_NEAR(h.g_zz, 4.0, 1e-15);
  EXPECT_NEAR(h.g_xx, std::sinh(2.0) * std::sinh(2.0), 1e-13);

  EXPECT_LT(metric_at(1e-9, KernelParams::su11(2.0, 1.0, 1.0)).g_xx, 1e-17);
}

TEST(Metric, DegenerateAndInvalidInputs) {
  EXPECT_THROW(metric_at(1.0, KernelParams::su2(0.0, 1.0, 1.0)), DomainError);
  EXPECT_THROW(metric_at(1.0, KernelParams::rbf(1.0)), DomainError);
  EXPECT_THROW(metric_at(0.0, KernelParams::su11(1.0, 1.0, 1.0)), DomainError);
}

TEST(Christoffel, ClosedFormValues) {
  // sqrt(2 alpha) = 2, (sqrt(2 alpha) z) = pi/4.
  const auto c = christoffel_closed_form(kPi / 8.0, KernelParams::su2(2.0, 1.0, 1.0));
  EXPECT_NEAR(c.gamma_x_xz, 2.0, 1e-14);
  EXPECT_NEAR(c.gamma_z_xx, -0.25, 1e-15);  // -sin(pi/2) / 4

  for (double z : {0.01, 0.5, 2.0}) {
    EXPECT_GT(christoffel_closed_form(z, KernelParams::su11(1.0, 1.0, 1.0)).gamma_x_xz, 0.0);
  }
  EXPECT_THROW(christoffel_closed_form(kPi / 2.0, KernelParams::su2(2.0, 1.0, 1.0)), DomainError);
}

TEST(Christoffel, MatchesFiniteDifferences) {
  for (Family family : {Family::AlphaSU2, Family::AlphaSU11}) {
    for (double alpha : {0.1, 0.5, 1.0, 2.0}) {
      for (double k : {0.5, 1.0, 2.0}) {
        const KernelParams p{family, alpha, k, 1.0, 1.0};
        for (double z : probe_points(p, 20, 17)) {
          const auto exact = christoffel_closed_form(z, p);
          const auto numeric = christoffel_finite_difference(z, p);
          EXPECT_NEAR(numeric.gamma_x_xz, exact.gamma_x_xz, 1e-6 * std::max(1.0, std::abs(exact.gamma_x_xz)));
          EXPECT_NEAR(numeric.gamma_z_xx, exact.gamma_z_xx, 1e-6 * std::max(1.0, std::abs(exact.gamma_z_xx)));
        }
      }
    }
  }
}

TEST(Curvature, ClosedForm) {
  EXPECT_EQ(curvature(0.3, KernelParams::su2(1.0, 1.0, 1.0), CurvatureMethod::ClosedForm).ricci_scalar, 4.0);
  EXPECT_EQ(curvature(0.3, KernelParams::su11(1.0, 2.0, 1.0), CurvatureMethod::ClosedForm).ricci_scalar, -2.0);
  const auto r = curvature(0.3, KernelParams::su2(2.0, 1.0, 1.0), CurvatureMethod::ClosedForm);
  EXPECT_NEAR(r.ricci_xx, std::pow(std::sin(0.6), 2), 1e-15);
  EXPECT_EQ(r.ricci_zz, 4.0);
}

TEST(Curvature, FiniteDifferenceReproducesConstantCurvature) {
  for (Family family : {Family::AlphaSU2, Family::AlphaSU11}) {
    for (double k : {0.5, 1.0, 2.0}) {
      const double expected = (family == Family::AlphaSU2 ? 4.0 : -4.0) / k;
      for (double alpha : {0.1, 0.5, 1.0, 2.0}) {
        const KernelParams p{family, alpha, k, 1.0, 1.0};
        double lo = INFINITY, hi = -INFINITY;
        for (double z : probe_points(p, 20, 5)) {
          const auto fd = curvature(z, p, CurvatureMethod::FiniteDifference);
          const auto exact = curvature(z, p, CurvatureMethod::ClosedForm);
          EXPECT_NEAR(fd.ricci_scalar, expected, 1e-4);
          EXPECT_NEAR(fd.ricci_zz, exact.ricci_zz, 1e-4 * std::max(1.0, std::abs(exact.ricci_zz)));
          EXPECT_NEAR(fd.ricci_xx, exact.ricci_xx, 1e-4 * std::max(1.0, std::abs(exact.ricci_xx)));
          lo = std::min(lo, fd.ricci_scalar);
          hi = std::max(hi, fd.ricci_scalar);
        }
        EXPECT_LT(hi - lo, 1e-4);
      }
    }
  }
}

TEST(Mesh, FullSu2ArchIsASphere) {
  const KernelParams p = KernelParams::su2(2.0, 1.0, 1.0);
  const auto mesh = revolution_surface_mesh(p, {0.0, kPi / 2.0}, {-kPi, kPi}, {65, 33});
  EXPECT_NEAR(mesh.angular_factor, 1.0, 1e-12);
  EXPECT_TRUE(mesh.warnings.empty());
  double max_radius = 0.0;
  const double radius = std::sqrt(0.5);
  for (const auto& v : mesh.vertices) {
    max_radius = std::max(max_radius, std::hypot(v[0], v[1]));
    // Sphere of radius sqrt(k/2) centred on the axis at height sqrt(k/2).
    EXPECT_NEAR(std::hypot(std::hypot(v[0], v[1]), v[2] - radius), radius, 1e-9);
  }
  EXPECT_NEAR(max_radius, radius, 1e-12);
  // Closed at both ends.
  EXPECT_NEAR(std::hypot(mesh.vertices.front()[0], mesh.vertices.front()[1]), 0.0, 1e-15);
  EXPECT_NEAR(std::hypot(mesh.vertices.back()[0], mesh.vertices.back()[1]), 0.0, 1e-12);
}

TEST(Mesh, SmallestMesh) {
  const auto mesh = revolution_surface_mesh(KernelParams::su2(1.0, 1.0, 1.0), {0.1, 1.0}, {0.0, 1.0}, {2, 2});
  ASSERT_EQ(mesh.vertices.size(), 4u);
  for (const auto& v : mesh.vertices)
    for (double c : v) EXPECT_TRUE(std::isfinite(c));
  EXPECT_THROW(revolution_surface_mesh(KernelParams::su2(1.0, 1.0, 1.0), {0.1, 1.0}, {0.0, 1.0}, {1, 2}),
               InputError);
}

TEST(Mesh, Su11ProfileFlaresMonotonically) {
  const KernelParams p = KernelParams::su11(2.0, 1.0, 1.0);
  const auto mesh = revolution_surface_mesh(p, {0.0, 1.0}, {-kPi, kPi}, {40, 8});
  EXPECT_GT(mesh.angular_factor, 1.0);
  double last_radius = -1.0, last_height = -1.0;
  for (std::size_t iz = 0; iz < mesh.nz; ++iz) {
    const auto& v = mesh.vertices[iz * mesh.nx];
    const double r = std::hypot(v[0], v[1]);
    EXPECT_GT(r, last_radius);
    EXPECT_GE(v[2], last_height);
    last_radius = r;
    last_height = v[2];
  }
}

TEST(Mesh, FixedAngularFactorEmitsEmbeddableBand) {
  const KernelParams p = KernelParams::su11(2.0, 1.0, 1.0);
  // cosh(2 z) <= 3 holds for z <= acosh(3) / 2 ~ 0.881.
  const auto mesh = revolution_surface_mesh(p, {0.0, 2.0}, {-1.0, 1.0}, {41, 4}, 3.0);
  ASSERT_FALSE(mesh.warnings.empty());
  EXPECT_LE(mesh.z_values.back(), std::acosh(3.0) / 2.0);
  EXPECT_GT(mesh.z_values.back(), std::acosh(3.0) / 2.0 - 0.06);
  // With c = 1 the hyperbolic profile is nowhere embeddable.
  EXPECT_THROW(revolution_surface_mesh(p, {0.0, 2.0}, {-1.0, 1.0}, {41, 4}, 1.0), NumericalError);
}

// Max error of the discrete first fundamental form over interior nodes.
double induced_metric_error(const KernelParams& p, std::pair<double, double> zr, std::size_t n) {
  const auto mesh = revolution_surface_mesh(p, zr, {-1.0, 1.0}, {n, n});
  const double dz = mesh.z_values[1] - mesh.z_values[0];
  const double dx = mesh.x_values[1] - mesh.x_values[0];
  auto at = [&](std::size_t iz, std::size_t ix) { return mesh.vertices[iz * mesh.nx + ix]; };
  auto sq = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]);
  };
  double worst = 0.0;
  for (std::size_t iz = 1; iz + 1 < n; ++iz) {
    const auto g = metric_at(mesh.z_values[iz], p);
    for (std::size_t ix = 1; ix + 1 < n; ++ix) {
      const double e = sq(at(iz + 1, ix), at(iz - 1, ix)) / (4.0 * dz * dz);
      const double gg = sq(at(iz, ix + 1), at(iz, ix - 1)) / (4.0 * dx * dx);
      worst = std::max({worst, std::abs(e - g.g_zz), std::abs(gg - g.g_xx)});
    }
  }
  return worst;
}

TEST(Mesh, InducedMetricConvergesAtSecondOrder) {
  for (const auto& [p, zr] : {std::pair{KernelParams::su2(1.0, 1.0, 1.0), std::pair{0.2, 2.0}},
                              std::pair{KernelParams::su11(0.5, 2.0, 1.0), std::pair{0.1, 1.5}}}) {
    const double coarse = induced_metric_error(p, zr, 17);
    const double fine = induced_metric_error(p, zr, 33);
    const double finer = induced_metric_error(p, zr, 65);
    EXPECT_GE(std::log2(coarse / fine), 1.8);
    EXPECT_GE(std::log2(fine / finer), 1.8);
  }
}

TEST(Mesh, CsvAndObjOutput) {
  const auto mesh = revolution_surface_mesh(KernelParams::su2(1.0, 1.0, 1.0), {0.1, 1.0}, {0.0, 1.0}, {3, 4});
  std::ostringstream csv, obj;
  write_mesh_csv(csv, mesh);
  write_mesh_obj(obj, mesh);
  const std::string c = csv.str();
  EXPECT_EQ(std::count(c.begin(), c.end(), '\n'), 1 + 12);
  const std::string o = obj.str();
  std::size_t vertices = 0, faces = 0;
  std::istringstream lines(o);
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("v ", 0) == 0) ++vertices;
    if (line.rfind("f ", 0) == 0) ++faces;
  }
  EXPECT_EQ(vertices, 12u);
  EXPECT_EQ(faces, 6u);
}

}  // namespace
}  // namespace metakernel
