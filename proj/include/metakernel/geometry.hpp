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
#include <string>
#include <utility>
#include <vector>

#include "metakernel/kernels.hpp"

namespace metakernel {

/// Diagonal feature-space metric ds^2 = g_zz dz^2 + g_xx dx^2 at (z, x).
struct MetricTensor {
  double g_zz = 0.0;
  double g_xx = 0.0;
  double z = 0.0;
  double x = 0.0;
};

/// The two nonzero (independent) Christoffel symbols of the second kind.
struct ChristoffelSymbols {
  double gamma_x_xz = 0.0;
  double gamma_z_xx = 0.0;
};

enum class CurvatureMethod { ClosedForm, FiniteDifference };

struct CurvatureReport {
  double ricci_xx = 0.0;
  double ricci_zz = 0.0;
  double ricci_scalar = 0.0;
  double z = 0.0;
  double x = 0.0;
  CurvatureMethod method = CurvatureMethod::ClosedForm;
};

/// SU(2):    k alpha dz^2 + (k/2) sin^2(z sqrt(2 alpha)) dx^2
/// SU(1,1):  k alpha dz^2 + (k/2) sinh^2(z sqrt(2 alpha)) dx^2
MetricTensor metric_at(double z, const KernelParams& params, double x = 0.0);

ChristoffelSymbols christoffel_closed_form(double z, const KernelParams& params);

/// Christoffel symbols from central differences of metric_at with Richardson
/// extrapolation.
ChristoffelSymbols christoffel_finite_difference(double z, const KernelParams& params, double x = 0.0);

CurvatureReport curvature(double z, const KernelParams& params, CurvatureMethod method, double x = 0.0);

/// Seeded probe coordinates z inside the band where the metric is
/// non-degenerate: sqrt(2 alpha) z in [0.05, pi - 0.05] for SU(2) and
/// [0.05, 3] for SU(1,1).
std::vector<double> probe_points(const KernelParams& params, std::size_t count, std::uint64_t seed);

struct SurfaceMesh {
  std::size_t nz = 0;
  std::size_t nx = 0;
  /// Row-major: index = iz * nx + ix.
  std::vector<std::array<double, 3>> vertices;
  std::vector<double> z_values;
  std::vector<double> x_values;
  /// The revolution angle is angular_factor * x; values above 1 shrink the
  /// radius so that flaring profiles stay embeddable.
  double angular_factor = 1.0;
  std::vector<std::string> warnings;
};

/// Embeds the feature-space metric as a surface of revolution. Profile radius
/// r(z) = sqrt(g_xx) / c, height h(z) = integral of sqrt(max(0, g_zz - r'(z)^2)).
/// With `angular_factor` unset, c is the smallest value >= 1 that embeds the
/// whole z band. If a fixed c leaves part of the band non-embeddable, the
/// largest embeddable band is emitted and a warning recorded.
SurfaceMesh revolution_surface_mesh(const KernelParams& params, std::pair<double, double> z_range,
                                    std::pair<double, double> x_range, std::pair<std::size_t, std::size_t> resolution,
                                    std::optional<double> angular_factor = std::nullopt);

/// `z_index,x_index,X,Y,Z` rows.
void write_mesh_csv(std::ostream& out, const SurfaceMesh& mesh);
/// Wavefront OBJ vertices and quad faces.
void write_mesh_obj(std::ostream& out, const SurfaceMesh& mesh);

}  // namespace metakernel
