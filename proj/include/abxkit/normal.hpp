// abxkit/normal.hpp

// Copyright 2026 The abxkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Standard normal density and distribution function.
//
//   Phi(z) = erfc(-z / sqrt 2) / 2
//
// erfc keeps full relative accuracy in the lower tail, where 1 + erf(.)
// would cancel; relative error stays below 1e-12 on |z| <= 8.

#include <cmath>
#include <numbers>

namespace abxkit {

// Lower bound applied to tail probabilities before taking logs.
inline constexpr double kTailFloor = 1e-300;

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

inline double log_normal_cdf(double z) {
  double p = normal_cdf(z);
  return std::log(p < kTailFloor ? kTailFloor : p);
}

/// phi(z) / Phi(z), the inverse Mills ratio. Far in the lower tail, where
/// Phi underflows, the asymptotic series is used instead.
inline double inverse_mills_ratio(double z) {
  if (z > -30.0) return normal_pdf(z) / normal_cdf(z);
  double r = 1.0 / (z * z);
  return -z / (1.0 - r + 3.0 * r * r - 15.0 * r * r * r);
}

}  // namespace abxkit
