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

#include "metakernel/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>
#include <vector>

#include "metakernel/error.hpp"
#include "metakernel/io.hpp"

namespace metakernel {
namespace {

// 1 - e^{i delta}, written so that delta = 0 gives exactly zero.
Complex one_minus_phase(double delta) {
  const double half = std::sin(0.5 * delta);
  return {2.0 * half * half, -std::sin(delta)};
}

Complex integer_pow(Complex base, int exponent) {
  Complex result{1.0, 0.0};
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

void check_dimensions(std::size_t a, std::size_t b) {
  if (a != b) {
    throw InputError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
  if (a == 0) throw InputError("kernel inputs must have at least one feature");
}

}  // namespace

std::string_view family_name(Family family) {
  switch (family) {
    case Family::AlphaSU2: return "su2";
    case Family::AlphaSU11: return "su11";
    case Family::Rbf: return "rbf";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "su2" || name == "alpha-su2" || name == "AlphaSU2") return Family::AlphaSU2;
  if (name == "su11" || name == "alpha-su11" || name == "AlphaSU11") return Family::AlphaSU11;
  if (name == "rbf" || name == "Rbf") return Family::Rbf;
  throw InputError("unknown kernel family '" + std::string(name) + "'");
}

KernelParams KernelParams::su2(double alpha, double k, double z) {
  return KernelParams{Family::AlphaSU2, alpha, k, z, 1.0};
}

KernelParams KernelParams::su11(double alpha, double k, double z) {
  return KernelParams{Family::AlphaSU11, alpha, k, z, 1.0};
}

KernelParams KernelParams::rbf(double gamma) {
  return KernelParams{Family::Rbf, 0.0, 1.0, 1.0, gamma};
}

double KernelParams::angle() const { return z * std::sqrt(alpha / 2.0); }

double KernelParams::z_sqrt_alpha() const { return z * std::sqrt(alpha); }

void KernelParams::validate() const {
  if (family == Family::Rbf) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("rbf: gamma must be positive and finite");
    return;
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be a finite magnitude >= 0");
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("z must be positive and finite");
  if (!std::isfinite(k)) throw DomainError("k must be finite");
  if (family == Family::AlphaSU2) {
    const double twice_k = 2.0 * k;
    const double rounded = std::round(twice_k);
    if (rounded < 1.0 || std::abs(twice_k - rounded) > 1e-12) {
      throw DomainError("su2: 2k must be a positive integer (k = " + format_double(k) + ")");
    }
    // Distance of the angle from the nearest pi/2 + n*pi.
    const double shifted = angle() - std::numbers::pi / 2.0;
    const double distance = std::abs(shifted - std::numbers::pi * std::round(shifted / std::numbers::pi));
    if (distance < kTanPoleGuard) {
      throw PoleError("su2: z*sqrt(alpha/2) = " + format_double(angle()) + " is on a tan pole");
    }
  } else {
    if (k < 0.5) throw DomainError("su11: k must be >= 0.5 (k = " + format_double(k) + ")");
  }
}

std::string describe(const KernelParams& params) {
  std::ostringstream out;
  out << family_name(params.family);
  if (params.family == Family::Rbf) {
    out << "(gamma=" << format_double(params.gamma) << ")";
  } else {
    out << "(alpha=" << format_double(params.alpha) << ", k=" << format_double(params.k)
        << ", z=" << format_double(params.z) << ")";
  }
  return out.str();
}

Kernel::Kernel(const KernelParams& params) : params_(params) {
  params_.validate();
  switch (params_.family) {
    case Family::AlphaSU2: {
      // t^2/(1+t^2) = sin^2 of the angle; avoids forming tan near a pole.
      const double s = std::sin(params_.angle());
      weight_ = s * s;
      integer_power_ = static_cast<int>(std::lround(2.0 * params_.k));
      break;
    }
    case Family::AlphaSU11: {
      // s^2/(1-s^2) with s = tanh(angle) is sinh^2(angle).
      const double s = std::sinh(params_.angle());
      weight_ = s * s;
      real_power_ = 2.0 * params_.k;
      break;
    }
    case Family::Rbf:
      break;
  }
}

Complex Kernel::eval_1d(double delta) const {
  switch (params_.family) {
    case Family::AlphaSU2:
      // (1 + t^2 e^{i delta}) / (1 + t^2) = 1 - sin^2(angle) (1 - e^{i delta})
      return integer_pow(Complex{1.0, 0.0} - weight_ * one_minus_phase(delta), integer_power_);
    case Family::AlphaSU11: {
      // (1 - s^2) / (1 - s^2 e^{i delta}) = 1 / (1 + sinh^2(angle) (1 - e^{i delta}));
      // the denominator has real part >= 1, so the principal power is smooth.
      const Complex denominator = Complex{1.0, 0.0} + weight_ * one_minus_phase(delta);
      return std::exp(-real_power_ * std::log(denominator));
    }
    case Family::Rbf:
      return {std::exp(-params_.gamma * delta * delta), 0.0};
  }
  return {};
}

Complex Kernel::operator()(std::span<const double> x, std::span<const double> x_prime) const {
  check_dimensions(x.size(), x_prime.size());
  switch (params_.family) {
    case Family::AlphaSU2: {
      Complex product{1.0, 0.0};
      for (std::size_t i = 0; i < x.size(); ++i) product *= eval_1d(x[i] - x_prime[i]);
      return product;
    }
    case Family::AlphaSU11: {
      // Product of principal powers = exp of the summed principal logs.
      Complex log_sum{0.0, 0.0};
      for (std::size_t i = 0; i < x.size(); ++i) {
        log_sum += std::log(Complex{1.0, 0.0} + weight_ * one_minus_phase(x[i] - x_prime[i]));
      }
      return std::exp(-real_power_ * log_sum);
    }
    case Family::Rbf:
      return {rbf_kernel(x, x_prime, params_.gamma), 0.0};
  }
  return {};
}

Complex su2_kernel_1d(double delta, const KernelParams& params) {
  if (params.family != Family::AlphaSU2) throw InputError("su2_kernel_1d: family must be su2");
  return Kernel(params).eval_1d(delta);
}

Complex su11_kernel_1d(double delta, const KernelParams& params) {
  if (params.family != Family::AlphaSU11) throw InputError("su11_kernel_1d: family must be su11");
  return Kernel(params).eval_1d(delta);
}

double rbf_kernel(std::span<const double> x, std::span<const double> x_prime, double gamma) {
  check_dimensions(x.size(), x_prime.size());
  if (!(gamma > 0.0)) throw DomainError("rbf: gamma must be positive");
  double squared = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - x_prime[i];
    squared += d * d;
  }
  return std::exp(-gamma * squared);
}

Complex contraction_limit_kernel(double delta, double lambda_sq) {
  if (!(lambda_sq >= 0.0)) throw DomainError("contraction_limit_kernel: lambda_sq must be >= 0");
  return std::exp(-lambda_sq * one_minus_phase(delta));
}

Complex kernel(std::span<const double> x, std::span<const double> x_prime, const KernelParams& params) {
  return Kernel(params)(x, x_prime);
}

GramMatrix gram(const RowMatrix& xs, const KernelParams& params, unsigned threads) {
  const Eigen::Index n = xs.rows();
  if (n == 0) throw InputError("gram: empty point set");
  if (xs.cols() == 0) throw InputError("gram: points have no features");
  const Kernel kern(params);

  GramMatrix result;
  result.complex_entries.resize(n, n);

  auto fill_rows = [&](Eigen::Index first, Eigen::Index last) {
    for (Eigen::Index i = first; i < last; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        const Complex value = kern(row_span(xs, i), row_span(xs, j));
        if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
          throw NumericalError("gram: non-finite kernel value at pair (" + std::to_string(i) + ", " +
                               std::to_string(j) + ")");
        }
        result.complex_entries(i, j) = value;
        result.complex_entries(j, i) = std::conj(value);
      }
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    fill_rows(0, n);
  } else {
    // Interleave rows so that the triangular workload is balanced.
    std::vector<std::exception_ptr> failures(threads);
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        try {
          for (Eigen::Index i = t; i < n; i += threads) fill_rows(i, i + 1);
        } catch (...) {
          failures[t] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }
  result.real_entries = result.complex_entries.real();
  return result;
}

Eigen::MatrixXd cross_gram_real(const RowMatrix& a, const RowMatrix& b, const KernelParams& params) {
  const Kernel kern(params);
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) out(i, j) = kern.real(row_span(a, i), row_span(b, j));
  }
  return out;
}

}  // namespace metakernel
