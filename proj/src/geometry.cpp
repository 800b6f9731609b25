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

#include "metakernel/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>

#include "metakernel/error.hpp"
#include "metakernel/io.hpp"
#include "metakernel/random.hpp"

namespace metakernel {
namespace {

using Point = std::array<double, 2>;   // (z, x)
using Metric2 = std::array<std::array<double, 2>, 2>;
// gamma[k][i][j] = Gamma^k_ij
using Connection = std::array<std::array<std::array<double, 2>, 2>, 2>;

constexpr int kZ = 0;
constexpr int kX = 1;

void require_curved(const KernelParams& params, const char* what) {
  if (params.family == Family::Rbf) {
    throw DomainError(std::string(what) + ": the rbf family has no curved feature-space metric");
  }
  if (!(params.alpha > 0.0) || !std::isfinite(params.alpha)) {
    throw DomainError(std::string(what) + ": alpha must be > 0 (alpha = 0 is the flat degenerate case)");
  }
  if (!(params.k > 0.0) || !std::isfinite(params.k)) throw DomainError(std::string(what) + ": k must be > 0");
}

double rate(const KernelParams& params) { return std::sqrt(2.0 * params.alpha); }

bool is_su2(const KernelParams& params) { return params.family == Family::AlphaSU2; }

Metric2 metric_matrix(const KernelParams& params, const Point& p) {
  const MetricTensor g = metric_at(p[kZ], params, p[kX]);
  return {{{g.g_zz, 0.0}, {0.0, g.g_xx}}};
}

// Central difference with one Richardson step. `f` maps a point to a flat
// array of N values; returns the derivative along `direction` for each.
template <std::size_t N>
std::array<double, N> richardson_partial(const std::function<std::array<double, N>(const Point&)>& f,
                                         const Point& p, int direction) {
  double h = 1e-4 * std::max(1.0, std::abs(p[static_cast<std::size_t>(direction)]));
  for (int attempt = 0; attempt < 4; ++attempt, h *= 0.25) {
    auto central = [&](double step) {
      Point plus = p;
      Point minus = p;
      plus[static_cast<std::size_t>(direction)] += step;
      minus[static_cast<std::size_t>(direction)] -= step;
      const auto fp = f(plus);
      const auto fm = f(minus);
      std::array<double, N> d{};
      for (std::size_t i = 0; i < N; ++i) d[i] = (fp[i] - fm[i]) / (2.0 * step);
      return d;
    };
    const auto coarse = central(h);
    const auto fine = central(0.5 * h);
    std::array<double, N> extrapolated{};
    bool converged = true;
    for (std::size_t i = 0; i < N; ++i) {
      extrapolated[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
      const double spread = std::abs(fine[i] - coarse[i]);
      if (!std::isfinite(extrapolated[i]) || spread > 1e-3 * std::max(1.0, std::abs(extrapolated[i]))) {
        converged = false;
      }
    }
    if (converged) return extrapolated;
  }
  throw NumericalError("finite differences did not converge at z = " + format_double(p[kZ]));
}

std::array<double, 4> flatten(const Metric2& g) { return {g[0][0], g[0][1], g[1][0], g[1][1]}; }

std::array<double, 8> flatten(const Connection& c) {
  std::array<double, 8> out{};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out[static_cast<std::size_t>(4 * k + 2 * i + j)] = c[k][i][j];
  return out;
}

Metric2 inverse(const Metric2& g) {
  const double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
  if (!(std::abs(det) > 0.0)) throw NumericalError("degenerate metric");
  return {{{g[1][1] / det, -g[0][1] / det}, {-g[1][0] / det, g[0][0] / det}}};
}

// Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
Connection numeric_connection(const KernelParams& params, const Point& p) {
  const std::function<std::array<double, 4>(const Point&)> g_flat = [&](const Point& q) {
    return flatten(metric_matrix(params, q));
  };
  std::array<std::array<double, 4>, 2> dg{};  // dg[l] = d_l g (flattened)
  for (int l = 0; l < 2; ++l) dg[static_cast<std::size_t>(l)] = richardson_partial<4>(g_flat, p, l);
  auto d = [&](int l, int i, int j) { return dg[static_cast<std::size_t>(l)][static_cast<std::size_t>(2 * i + j)]; };

  const Metric2 g_inv = inverse(metric_matrix(params, p));
  Connection gamma{};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double sum = 0.0;
        for (int l = 0; l < 2; ++l) sum += g_inv[k][l] * (d(i, j, l) + d(j, i, l) - d(l, i, j));
        gamma[k][i][j] = 0.5 * sum;
      }
  return gamma;
}

double profile_radius(const KernelParams& params, double z) {
  const double a = rate(params);
  const double scale = std::sqrt(params.k / 2.0);
  return is_su2(params) ? scale * std::abs(std::sin(a * z)) : scale * std::sinh(a * z);
}

double profile_slope(const KernelParams& params, double z) {
  const double a = rate(params);
  const double scale = std::sqrt(params.k / 2.0);
  if (is_su2(params)) {
    const double s = std::sin(a * z);
    return scale * a * std::cos(a * z) * (s < 0.0 ? -1.0 : 1.0);
  }
  return scale * a * std::cosh(a * z);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = 0.5 * (lo + hi);
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

}  // namespace

MetricTensor metric_at(double z, const KernelParams& params, double x) {
  require_curved(params, "metric_at");
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("metric_at: z must be > 0");
  const double a = rate(params);
  MetricTensor g;
  g.z = z;
  g.x = x;
  g.g_zz = params.k * params.alpha;
  const double radial = is_su2(params) ? std::sin(a * z) : std::sinh(a * z);
  g.g_xx = 0.5 * params.k * radial * radial;
  return g;
}

ChristoffelSymbols christoffel_closed_form(double z, const KernelParams& params) {
  require_curved(params, "christoffel_closed_form");
  const double a = rate(params);
  const double s = is_su2(params) ? std::sin(a * z) : std::sinh(a * z);
  if (std::abs(s) < 1e-12) throw DomainError("christoffel_closed_form: z is at a coordinate singularity");
  ChristoffelSymbols out;
  if (is_su2(params)) {
    out.gamma_x_xz = a * std::cos(a * z) / s;
    out.gamma_z_xx = -std::sin(2.0 * a * z) / (2.0 * a);
  } else {
    out.gamma_x_xz = a * std::cosh(a * z) / s;
    out.gamma_z_xx = -std::sinh(2.0 * a * z) / (2.0 * a);
  }
  return out;
}

ChristoffelSymbols christoffel_finite_difference(double z, const KernelParams& params, double x) {
  require_curved(params, "christoffel_finite_difference");
  const Connection gamma = numeric_connection(params, {z, x});
  return {gamma[kX][kX][kZ], gamma[kZ][kX][kX]};
}

CurvatureReport curvature(double z, const KernelParams& params, CurvatureMethod method, double x) {
  require_curved(params, "curvature");
  CurvatureReport report;
  report.z = z;
  report.x = x;
  report.method = method;

  if (method == CurvatureMethod::ClosedForm) {
    const double a = rate(params);
    if (is_su2(params)) {
      const double s = std::sin(a * z);
      report.ricci_xx = s * s;
      report.ricci_zz = 2.0 * params.alpha;
      report.ricci_scalar = 4.0 / params.k;
    } else {
      const double s = std::sinh(a * z);
      report.ricci_xx = -s * s;
      report.ricci_zz = -2.0 * params.alpha;
      report.ricci_scalar = -4.0 / params.k;
    }
    return report;
  }

  const Point p{z, x};
  const std::function<std::array<double, 8>(const Point&)> gamma_flat = [&](const Point& q) {
    return flatten(numeric_connection(params, q));
  };
  const Connection gamma = numeric_connection(params, p);
  // dgamma[l][k][i][j] = d_l Gamma^k_ij
  std::array<std::array<double, 8>, 2> dgamma{};
  for (int l = 0; l < 2; ++l) dgamma[static_cast<std::size_t>(l)] = richardson_partial<8>(gamma_flat, p, l);
  auto d = [&](int l, int k, int i, int j) {
    return dgamma[static_cast<std::size_t>(l)][static_cast<std::size_t>(4 * k + 2 * i + j)];
  };

  // R_ij = d_k Gamma^k_ij - d_i Gamma^k_kj + Gamma^k_ij Gamma^l_kl - Gamma^l_ik Gamma^k_lj
  Metric2 ricci{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double sum = 0.0;
      for (int k = 0; k < 2; ++k) {
        sum += d(k, k, i, j) - d(i, k, k, j);
        for (int l = 0; l < 2; ++l) sum += gamma[k][i][j] * gamma[l][k][l] - gamma[l][i][k] * gamma[k][l][j];
      }
      ricci[i][j] = sum;
    }
  const Metric2 g_inv = inverse(metric_matrix(params, p));
  double scalar = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) scalar += g_inv[i][j] * ricci[i][j];

  report.ricci_zz = ricci[kZ][kZ];
  report.ricci_xx = ricci[kX][kX];
  report.ricci_scalar = scalar;
  return report;
}

std::vector<double> probe_points(const KernelParams& params, std::size_t count, std::uint64_t seed) {
  require_curved(params, "probe_points");
  const double a = rate(params);
  const double lo = 0.05;
  const double hi = is_su2(params) ? std::numbers::pi - 0.05 : 3.0;
  Rng rng(seed);
  std::vector<double> out(count);
  for (auto& z : out) z = (lo + (hi - lo) * rng.uniform()) / a;
  return out;
}

SurfaceMesh revolution_surface_mesh(const KernelParams& params, std::pair<double, double> z_range,
                                    std::pair<double, double> x_range, std::pair<std::size_t, std::size_t> resolution,
                                    std::optional<double> angular_factor) {
  require_curved(params, "revolution_surface_mesh");
  auto [nz, nx] = resolution;
  if (nz < 2 || nx < 2) throw InputError("revolution_surface_mesh: resolution must be >= 2 per axis");
  auto [z_lo, z_hi] = z_range;
  if (!(z_lo >= 0.0) || !(z_hi > z_lo)) throw InputError("revolution_surface_mesh: need 0 <= z_min < z_max");
  if (!(x_range.second > x_range.first)) throw InputError("revolution_surface_mesh: need x_min < x_max");
  const double a = rate(params);
  if (is_su2(params)) {
    const double arch = std::floor(a * z_lo / std::numbers::pi);
    if (a * z_hi > (arch + 1.0) * std::numbers::pi * (1.0 + 1e-12)) {
      throw InputError("revolution_surface_mesh: su2 z range must lie inside one sin arch");
    }
  }
  if (angular_factor && !(*angular_factor >= 1.0)) {
    throw InputError("revolution_surface_mesh: angular factor must be >= 1");
  }

  const double g_zz = params.k * params.alpha;
  constexpr std::size_t kSubsteps = 16;
  SurfaceMesh mesh;

  double factor = 1.0;
  if (angular_factor) {
    factor = *angular_factor;
  } else {
    for (double z : linspace(z_lo, z_hi, (nz - 1) * kSubsteps + 1)) {
      factor = std::max(factor, std::abs(profile_slope(params, z)) / std::sqrt(g_zz));
    }
  }
  mesh.angular_factor = factor;

  auto embeddable = [&](double z) {
    const double slope = profile_slope(params, z) / factor;
    return slope * slope <= g_zz * (1.0 + 1e-12);
  };

  std::vector<double> zs = linspace(z_lo, z_hi, nz);
  // Largest contiguous run of embeddable nodes.
  std::size_t best_start = 0, best_len = 0;
  for (std::size_t i = 0; i < nz;) {
    if (!embeddable(zs[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < nz && embeddable(zs[j])) ++j;
    if (j - i > best_len) {
      best_start = i;
      best_len = j - i;
    }
    i = j;
  }
  if (best_len < 2) {
    throw NumericalError("revolution_surface_mesh: no embeddable band for angular factor " + format_double(factor));
  }
  if (best_len < nz) {
    const double band_lo = zs[best_start];
    const double band_hi = zs[best_start + best_len - 1];
    mesh.warnings.push_back("profile not embeddable on the full z range; emitting band [" + format_double(band_lo) +
                            ", " + format_double(band_hi) + "]");
    zs = linspace(band_lo, band_hi, nz);
  }

  // Cumulative Simpson integration of the height profile.
  auto height_rate = [&](double z) {
    const double slope = profile_slope(params, z) / factor;
    return std::sqrt(std::max(0.0, g_zz - slope * slope));
  };
  std::vector<double> heights(nz, 0.0);
  for (std::size_t i = 1; i < nz; ++i) {
    const double h = (zs[i] - zs[i - 1]) / static_cast<double>(kSubsteps);
    double sum = height_rate(zs[i - 1]) + height_rate(zs[i]);
    for (std::size_t s = 1; s < kSubsteps; ++s) {
      sum += (s % 2 == 1 ? 4.0 : 2.0) * height_rate(zs[i - 1] + h * static_cast<double>(s));
    }
    heights[i] = heights[i - 1] + sum * h / 3.0;
  }

  mesh.nz = nz;
  mesh.nx = nx;
  mesh.z_values = zs;
  mesh.x_values = linspace(x_range.first, x_range.second, nx);
  mesh.vertices.reserve(nz * nx);
  for (std::size_t iz = 0; iz < nz; ++iz) {
    const double radius = profile_radius(params, zs[iz]) / factor;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double phi = factor * mesh.x_values[ix];
      mesh.vertices.push_back({radius * std::cos(phi), radius * std::sin(phi), heights[iz]});
    }
  }
  return mesh;
}

void write_mesh_csv(std::ostream& out, const SurfaceMesh& mesh) {
  out << "z_index,x_index,X,Y,Z\n";
  for (std::size_t iz = 0; iz < mesh.nz; ++iz) {
    for (std::size_t ix = 0; ix < mesh.nx; ++ix) {
      const auto& v = mesh.vertices[iz * mesh.nx + ix];
      out << iz << ',' << ix << ',' << format_double(v[0]) << ',' << format_double(v[1]) << ','
          << format_double(v[2]) << '\n';
    }
  }
}

void write_mesh_obj(std::ostream& out, const SurfaceMesh& mesh) {
  out << "# surface of revolution, " << mesh.nz << " x " << mesh.nx << " vertices\n";
  for (const auto& v : mesh.vertices) {
    out << "v " << format_double(v[0]) << ' ' << format_double(v[1]) << ' ' << format_double(v[2]) << '\n';
  }
  for (std::size_t iz = 0; iz + 1 < mesh.nz; ++iz) {
    for (std::size_t ix = 0; ix + 1 < mesh.nx; ++ix) {
      const std::size_t a = iz * mesh.nx + ix + 1;
      const std::size_t b = (iz + 1) * mesh.nx + ix + 1;
      out << "f " << a << ' ' << b << ' ' << b + 1 << ' ' << a + 1 << '\n';
    }
  }
}

}  // namespace metakernel
