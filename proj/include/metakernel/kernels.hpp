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

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace metakernel {

using Complex = std::complex<double>;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> row_span(const RowMatrix& m, Eigen::Index row) {
  return {m.data() + row * m.cols(), static_cast<std::size_t>(m.cols())};
}

enum class Family { AlphaSU2, AlphaSU11, Rbf };

std::string_view family_name(Family family);
/// Accepts "su2", "su11", "rbf" and the long forms "alpha-su2", "alpha-su11".
Family parse_family(std::string_view name);

/// Meta-kernel coordinates. The sign of the deformation lives in `family`;
/// `alpha` is always the magnitude |alpha|.
struct KernelParams {
  Family family = Family::Rbf;
  double alpha = 0.0;
  double k = 1.0;
  double z = 1.0;
  double gamma = 1.0;

  static KernelParams su2(double alpha, double k, double z);
  static KernelParams su11(double alpha, double k, double z);
  static KernelParams rbf(double gamma);

  /// z * sqrt(alpha / 2), the argument of tan / tanh.
  double angle() const;
  /// z * sqrt(alpha), the combined boundary-shaping parameter.
  double z_sqrt_alpha() const;
  /// Throws DomainError / PoleError if the invariants of the family fail.
  void validate() const;

  bool operator==(const KernelParams&) const = default;
};

/// Distance below which an SU(2) angle counts as sitting on a tan pole.
inline constexpr double kTanPoleGuard = 1e-6;

std::string describe(const KernelParams& params);

Complex su2_kernel_1d(double delta, const KernelParams& params);
Complex su11_kernel_1d(double delta, const KernelParams& params);
double rbf_kernel(std::span<const double> x, std::span<const double> x_prime, double gamma);

/// Harmonic-oscillator coherent-state overlap exp(lambda_sq (e^{i delta} - 1)).
Complex contraction_limit_kernel(double delta, double lambda_sq);

/// Validated kernel with per-parameter constants precomputed. Immutable and
/// safe to share between threads.
class Kernel {
 public:
  explicit Kernel(const KernelParams& params);

  const KernelParams& params() const { return params_; }

  Complex eval_1d(double delta) const;
  Complex operator()(std::span<const double> x, std::span<const double> x_prime) const;
  double real(std::span<const double> x, std::span<const double> x_prime) const {
    return (*this)(x, x_prime).real();
  }

 private:
  KernelParams params_;
  // sin^2(angle) for SU(2), sinh^2(angle) for SU(1,1).
  double weight_ = 0.0;
  int integer_power_ = 0;
  double real_power_ = 0.0;
};

Complex kernel(std::span<const double> x, std::span<const double> x_prime, const KernelParams& params);

struct GramMatrix {
  Eigen::MatrixXcd complex_entries;
  Eigen::MatrixXd real_entries;

  Eigen::Index size() const { return real_entries.rows(); }
};

/// Pairwise kernel matrix over the rows of `xs`. Rows may be split across
/// `threads` workers; every entry is computed independently, so the result
/// does not depend on the thread count.
GramMatrix gram(const RowMatrix& xs, const KernelParams& params, unsigned threads = 1);

/// Real part of kernel(a_i, b_j) for every row pair.
Eigen::MatrixXd cross_gram_real(const RowMatrix& a, const RowMatrix& b, const KernelParams& params);

}  // namespace metakernel
