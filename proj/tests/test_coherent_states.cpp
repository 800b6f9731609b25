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

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "metakernel/coherent_states.hpp"
#include "metakernel/error.hpp"

namespace metakernel {
namespace {

TEST(CoherentState, ZeroAlphaIsGroundState) {
  for (const auto& p : {KernelParams::su2(0.0, 2.0, 1.0), KernelParams::su11(0.0, 1.5, 1.0)}) {
    const auto s = build_state(0.7, p);
    EXPECT_EQ(s.coefficients.front(), Complex(1.0, 0.0));
    for (std::size_t m = 1; m < s.coefficients.size(); ++m) EXPECT_EQ(s.coefficients[m], Complex(0.0, 0.0));
    EXPECT_EQ(overlap(s, build_state(-2.1, p)), Complex(1.0, 0.0));
  }
}

TEST(CoherentState, Su2HalfSpinHasTwoLevels) {
  const auto s = build_state(0.3, KernelParams::su2(1.0, 0.5, 1.2));
  ASSERT_EQ(s.coefficients.size(), 2u);
  EXPECT_NEAR(std::norm(s.coefficients[0]) + std::norm(s.coefficients[1]), 1.0, 1e-15);
  EXPECT_EQ(s.truncation_tail, 0.0);
}

TEST(CoherentState, Su2HasExactly2kPlusOneCoefficients) {
  for (double k : {0.5, 1.0, 1.5, 4.0}) {
    const auto s = build_state(0.0, KernelParams::su2(2.0, k, 2.5));  // angle > pi/2: negative tan
    EXPECT_EQ(s.coefficients.size(), static_cast<std::size_t>(2 * k + 1));
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
  }
}

TEST(CoherentState, Su11RegressionCountAndNorm) {
  // Frozen from an independent high-precision summation of |c_m|^2 until the
  // first term below 1e-16 past the peak.
  const auto s = build_state(0.0, KernelParams::su11(2.0, 1.0, 1.0));
  EXPECT_EQ(s.coefficients.size(), 74u);
  EXPECT_NEAR(s.norm_squared(), 0.99999999999999989970, 1e-14);
  EXPECT_NEAR(s.truncation_tail, 1.0035968396894612e-16, 1e-20);
  EXPECT_NEAR(s.norm_squared() + s.truncation_tail, 1.0, 1e-15);
}

TEST(CoherentState, NormalizedWithinTail) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> alpha(0.01, 3.0), z(0.1, 4.6), k(0.5, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = build_state(0.1, KernelParams::su11(alpha(rng), k(rng), z(rng)));
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-10 + s.truncation_tail);
    EXPECT_LT(std::norm(s.coefficients.back()), kTruncationThreshold);
  }
}

TEST(CoherentState, HarmonicOscillatorMatchesLimitKernel) {
  for (double lambda_sq : {0.0, 0.25, 1.0, 4.0, 30.0}) {
    const auto a = build_harmonic_state(0.4, lambda_sq);
    const auto b = build_harmonic_state(-1.3, lambda_sq);
    EXPECT_NEAR(a.norm_squared(), 1.0, 1e-10 + a.truncation_tail);
    EXPECT_NEAR(std::abs(overlap(a, b) - contraction_limit_kernel(0.4 + 1.3, lambda_sq)), 0.0, 1e-10);
  }
}

TEST(CoherentState, OverlapAlgebra) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  for (const auto& p : {KernelParams::su2(0.7, 2.0, 1.4), KernelParams::su11(1.3, 0.75, 2.2)}) {
    for (int trial = 0; trial < 50; ++trial) {
      const double x = u(rng), xp = u(rng), shift = u(rng);
      const auto a = build_state(x, p);
      const auto b = build_state(xp, p);
      const auto ab = overlap(a, b);
      EXPECT_NEAR(std::abs(ab - std::conj(overlap(b, a))), 0.0, 1e-15);
      EXPECT_LE(std::abs(ab), 1.0 + 1e-10);
      EXPECT_NEAR(std::abs(overlap(a, a) - Complex(1.0, 0.0)), 0.0, 1e-10 + a.truncation_tail);
      const auto shifted = overlap(build_state(x + shift, p), build_state(xp + shift, p));
      EXPECT_NEAR(std::abs(shifted - ab), 0.0, 1e-12);
    }
  }
}

TEST(CoherentState, OverlapRejectsMismatchedStates) {
  const auto a = build_state(0.0, KernelParams::su2(1.0, 1.0, 1.0));
  const auto b = build_state(0.0, KernelParams::su2(1.0, 2.0, 1.0));
  const auto c = build_state(0.0, KernelParams::su11(1.0, 1.0, 1.0));
  EXPECT_THROW(overlap(a, b), InputError);
  EXPECT_THROW(overlap(a, c), InputError);
  EXPECT_THROW(overlap(build_harmonic_state(0.0, 1.0), build_harmonic_state(0.0, 2.0)), InputError);
  EXPECT_THROW(build_state(0.0, KernelParams::rbf(1.0)), InputError);
}

TEST(CoherentState, CoefficientCap) {
  // tanh^2 within ~1e-9 of 1 needs far more than 1e6 terms.
  EXPECT_THROW(build_state(0.0, KernelParams::su11(2.0, 1.0, 11.0)), NumericalError);
}

TEST(CoherentState, ProfileCsv) {
  const auto s = build_state(0.0, KernelParams::su2(2.0, 1.0, std::numbers::pi / 4.0));
  std::ostringstream out;
  write_profile_csv(out, s);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, 14), "m,probability\n");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

}  // namespace
}  // namespace metakernel
