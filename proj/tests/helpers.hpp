/*
 * Copyright 2026 The puncture authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>

#include "puncture/common.hpp"

namespace testing_helpers {

// Smooth bump exp(-1 / (1 - s^2)) on |s| < 1 and its first two derivatives.
inline double bump(double s) {
  const double w = 1.0 - s * s;
  return w > 0.0 ? std::exp(-1.0 / w) : 0.0;
}

inline double bump_d1(double s) {
  const double w = 1.0 - s * s;
  const double b = bump(s);
  return b > 0.0 ? -2.0 * s / (w * w) * b : 0.0;
}

inline double bump_d2(double s) {
  const double w = 1.0 - s * s;
  const double b = bump(s);
  // Near the edge exp(-1/w) underflows before w^{-4} overflows.
  if (!(b > 0.0)) return 0.0;
  return b * (-2.0 / (w * w) - 8.0 * s * s / (w * w * w) + 4.0 * s * s / (w * w * w * w));
}

// Laplacian in R^n of x -> bump(|x - c| / R), as a function of rho = |x - c|.
inline double bump_laplacian(int n, double rho, double radius) {
  const double s = rho / radius;
  if (s == 0.0) return n * bump_d2(0.0) / (radius * radius);
  return bump_d2(s) / (radius * radius) + (n - 1) * bump_d1(s) / (radius * rho);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace testing_helpers
