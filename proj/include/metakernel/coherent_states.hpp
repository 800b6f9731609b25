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
#include <iosfwd>
#include <vector>

#include "metakernel/kernels.hpp"

namespace metakernel {

enum class StateFamily { AlphaSU2, AlphaSU11, HarmonicOscillator };

/// Squared amplitudes below this end the series for the infinite families.
inline constexpr double kTruncationThreshold = 1e-16;
inline constexpr std::size_t kMaxCoefficients = 1'000'000;

/// Truncated Fock-space expansion of a coherent state at position `x`.
///
/// Amplitudes carry the phase (-1)^m e^{-imx}, so overlap(state(x), state(x'))
/// depends on x - x' only. `truncation_tail` bounds the squared mass of the
/// discarded coefficients (zero for the finite SU(2) expansion).
struct CoherentState {
  StateFamily family = StateFamily::AlphaSU2;
  std::vector<Complex> coefficients;
  double k = 0.0;
  double truncation_tail = 0.0;
  double x = 0.0;
  /// Provenance for the deformed families.
  KernelParams params;
  /// |z|^2 for the harmonic oscillator family.
  double lambda_sq = 0.0;

  double norm_squared() const;
};

/// SU(2): c_m = (-1)^m e^{-imx} sqrt(C(2k,m)) sin^m(a) cos^{2k-m}(a) (sign-adjusted), a = z sqrt(alpha/2).
/// SU(1,1): c_m = (-1)^m e^{-imx} sqrt(Gamma(2k+m) / (m! Gamma(2k))) tanh^m(a) sech^{2k}(a).
CoherentState build_state(double x, const KernelParams& params);

/// Normalized harmonic-oscillator state with amplitude -sqrt(lambda_sq) e^{-ix}.
CoherentState build_harmonic_state(double x, double lambda_sq);

/// sum_m conj(a_m) b_m. Both states must come from the same parameters.
Complex overlap(const CoherentState& a, const CoherentState& b);

/// CSV profile `m,probability` of |c_m|^2.
void write_profile_csv(std::ostream& out, const CoherentState& state);

}  // namespace metakernel
