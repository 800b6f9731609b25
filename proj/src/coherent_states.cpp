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

#include "metakernel/coherent_states.hpp"

#include <cmath>
#include <ostream>

#include "metakernel/error.hpp"
#include "metakernel/io.hpp"

namespace metakernel {
namespace {

Complex phase(std::size_t m, double x) {
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  const double angle = -static_cast<double>(m) * x;
  return {sign * std::cos(angle), sign * std::sin(angle)};
}

// Appends amplitudes from log-weights until the squared amplitude drops below
// the threshold past the peak, then records a geometric tail bound. The ratio
// |c_{m+1}|^2 / |c_m|^2 must be non-increasing in m.
template <typename LogWeight, typename Ratio>
void fill_infinite_series(CoherentState& state, LogWeight log_weight_sq, Ratio ratio) {
  for (std::size_t m = 0;; ++m) {
    if (m >= kMaxCoefficients) {
      throw NumericalError("coherent state needs more than " + std::to_string(kMaxCoefficients) +
                           " coefficients before reaching the truncation threshold");
    }
    const double weight_sq = std::exp(log_weight_sq(m));
    state.coefficients.push_back(std::sqrt(weight_sq) * phase(m, state.x));
    const double r = ratio(m);
    if (weight_sq < kTruncationThreshold && r < 1.0) {
      state.truncation_tail = weight_sq * r / (1.0 - r);
      return;
    }
  }
}

}  // namespace

double CoherentState::norm_squared() const {
  double total = 0.0;
  for (const auto& c : coefficients) total += std::norm(c);
  return total;
}

CoherentState build_state(double x, const KernelParams& params) {
  params.validate();
  CoherentState state;
  state.x = x;
  state.k = params.k;
  state.params = params;

  switch (params.family) {
    case Family::AlphaSU2: {
      state.family = StateFamily::AlphaSU2;
      const int n = static_cast<int>(std::lround(2.0 * params.k));
      // tan^m(a) (1 + tan^2 a)^{-k} = sin^m(a) cos^{-m}(a) |cos a|^{2k}
      const double s = std::sin(params.angle());
      const double c = std::cos(params.angle());
      const double sign_cos = c < 0.0 ? -1.0 : 1.0;
      double binomial = 1.0;
      state.coefficients.reserve(static_cast<std::size_t>(n) + 1);
      for (int m = 0; m <= n; ++m) {
        const double magnitude = std::sqrt(binomial) * std::pow(std::abs(s), m) * std::pow(std::abs(c), n - m);
        const double sign = ((s < 0.0 && m % 2 == 1) ? -1.0 : 1.0) * ((m % 2 == 1) ? sign_cos : 1.0);
        state.coefficients.push_back(sign * magnitude * phase(static_cast<std::size_t>(m), x));
        binomial = binomial * static_cast<double>(n - m) / static_cast<double>(m + 1);
      }
      state.truncation_tail = 0.0;
      break;
    }
    case Family::AlphaSU11: {
      state.family = StateFamily::AlphaSU11;
      const double t = std::tanh(params.angle());
      const double two_k = 2.0 * params.k;
      if (t == 0.0) {
        state.coefficients.push_back({1.0, 0.0});
        break;
      }
      // log of sech^{4k}(a) = 2k log(1 - t^2), computed from cosh to keep precision.
      const double log_prefactor = -2.0 * two_k * std::log(std::cosh(params.angle()));
      const double log_t_sq = 2.0 * std::log(std::abs(t));
      const double lgamma_two_k = std::lgamma(two_k);
      const double t_sq = t * t;
      fill_infinite_series(
          state,
          [&](std::size_t m) {
            const double md = static_cast<double>(m);
            return log_prefactor + md * log_t_sq + std::lgamma(two_k + md) - std::lgamma(md + 1.0) -
                   lgamma_two_k;
          },
          [&](std::size_t m) {
            const double md = static_cast<double>(m);
            return t_sq * (two_k + md) / (md + 1.0);
          });
      if (t < 0.0) {
        for (std::size_t m = 1; m < state.coefficients.size(); m += 2) state.coefficients[m] = -state.coefficients[m];
      }
      break;
    }
    case Family::Rbf:
      throw InputError("build_state: the rbf family has no deformed coherent state; use build_harmonic_state");
  }
  return state;
}

CoherentState build_harmonic_state(double x, double lambda_sq) {
  if (!(lambda_sq >= 0.0) || !std::isfinite(lambda_sq)) {
    throw DomainError("build_harmonic_state: lambda_sq must be finite and >= 0");
  }
  CoherentState state;
  state.family = StateFamily::HarmonicOscillator;
  state.x = x;
  state.lambda_sq = lambda_sq;
  if (lambda_sq == 0.0) {
    state.coefficients.push_back({1.0, 0.0});
    return state;
  }
  const double log_lambda = std::log(lambda_sq);
  fill_infinite_series(
      state,
      [&](std::size_t m) {
        const double md = static_cast<double>(m);
        return -lambda_sq + md * log_lambda - std::lgamma(md + 1.0);
      },
      [&](std::size_t m) { return lambda_sq / (static_cast<double>(m) + 1.0); });
  return state;
}

Complex overlap(const CoherentState& a, const CoherentState& b) {
  if (a.family != b.family) throw InputError("overlap: states belong to different families");
  if (a.family == StateFamily::HarmonicOscillator) {
    if (a.lambda_sq != b.lambda_sq) throw InputError("overlap: harmonic states with different amplitudes");
  } else if (!(a.params == b.params)) {
    throw InputError("overlap: states built from different parameters");
  }
  const std::size_t n = std::min(a.coefficients.size(), b.coefficients.size());
  Complex total{0.0, 0.0};
  for (std::size_t m = 0; m < n; ++m) total += std::conj(a.coefficients[m]) * b.coefficients[m];
  return total;
}

void write_profile_csv(std::ostream& out, const CoherentState& state) {
  out << "m,probability\n";
  for (std::size_t m = 0; m < state.coefficients.size(); ++m) {
    out << m << ',' << format_double(std::norm(state.coefficients[m])) << '\n';
  }
}

}  // namespace metakernel
