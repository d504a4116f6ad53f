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

#include <vector>

#include "puncture/common.hpp"
#include "puncture/operators.hpp"
#include "puncture/quad.hpp"
#include "puncture/sobolev.hpp"
#include "puncture/specfun.hpp"

// Heat kernel of the n = 3 point interaction:
//   G_beta(t,x,y) = P(t,x-y) + (2t/|x||y|) P(t,|x|+|y|) (1 - 4 pi alpha J_t(|x|+|y|)),
//   J_t(rho) = int_0^inf exp(-4 pi alpha u - u (u + 2 rho) / 4t) du.
namespace puncture::heatkernel {

using specfun::KernelValue;

struct HeatKernelQuery {
  double t;
  Point x, y;
  operators::PointInteraction op;

  void validate() const;
};

// P(t, r) = (4 pi t)^{-3/2} exp(-r^2 / 4t).
double gaussian(double t, double r);

// J_t(rho) for a = 4 pi alpha; error_estimate carries the quadrature error.
KernelValue j_integral(double a, double t, double rho, const quad::QuadratureSpec& spec = {});
// 1 - a J_t(rho), written without cancellation when a > 0.
KernelValue attenuation(double a, double t, double rho, const quad::QuadratureSpec& spec = {});

// alpha = infinity (beta = 0) collapses to P(t, x - y).
KernelValue heat_kernel_alpha(double t, const Point& x, const Point& y, ExtReal alpha,
                              const quad::QuadratureSpec& spec = {});
KernelValue heat_kernel_beta(const HeatKernelQuery& q, const quad::QuadratureSpec& spec = {},
                             operators::Dictionary dict = operators::Dictionary::EightPi);

// R_beta(t, y) = lim_{x -> 0} G_beta(t, x, y) / G_3(x) = (8 pi t / |y|) P(t, y) (1 - 4 pi alpha J_t(|y|)).
KernelValue r_beta(double t, const Point& y, const operators::PointInteraction& op, const quad::QuadratureSpec& spec = {},
                   operators::Dictionary dict = operators::Dictionary::EightPi);

struct LimitDiagnostic {
  double value;           // extrapolated limit
  double error_estimate;  // gap between the last two extrapolants
  bool monotone;          // raw ratios approach the limit monotonically
  std::vector<double> ratios;
};

// G_beta(t, x_k, y) / G_3(x_k) along |x_k| = 2^{-k}, k = k_min..k_max, extrapolated to 0.
LimitDiagnostic r_beta_limit(double t, const Point& y, const operators::PointInteraction& op,
                             const quad::QuadratureSpec& spec = quad::QuadratureSpec::precise(), int k_min = 6,
                             int k_max = 14, operators::Dictionary dict = operators::Dictionary::EightPi);

// c(alpha, T) = 1 - 4 pi alpha int_0^inf exp(-4 pi |alpha| u - u^2 / 4T) du.
double c_lower_bound(double alpha, double T, const quad::QuadratureSpec& spec = {});

// Integrable majorant of G_beta(t, x, y) / G_3(x) over |x| <= 1, valid for alpha >= 0.
double envelope(double t, const Point& y);

// Boundary values of the kernel in the G_3 frame: G_beta(t, ., y) = c0 G_3 + f with
// c0 = R_beta(t, y); returns (c0, f(0)).
struct KernelTrace {
  double c0;
  double f0;
};
KernelTrace kernel_trace(double t, const Point& y, ExtReal alpha, const quad::QuadratureSpec& spec = {});

sobolev::SingularDecomposition dirichlet_map(Complex gamma, int n);

// (I + A_beta) S_beta(t) Dir gamma evaluated at x: gamma P(t, x) for beta = 0 and
// (gamma / beta) R_beta(t, x) otherwise; beta = infinity is rejected.
double dirichlet_response(const operators::PointInteraction& op, double t, double gamma, const Point& x,
                          const quad::QuadratureSpec& spec = {});

// [S_beta(t) v](x) = int G_beta(t, x, y) v(y) dy.
double semigroup_apply(const operators::PointInteraction& op, double t, const operators::Source& v, const Point& x,
                       const quad::QuadratureSpec& spec = {}, operators::Dictionary dict = operators::Dictionary::EightPi);

// int R_beta(t, y) v(y) dy.
double boundary_response(const operators::PointInteraction& op, double t, const operators::Source& v,
                         const quad::QuadratureSpec& spec = {}, operators::Dictionary dict = operators::Dictionary::EightPi);

// int G_beta(t, x, y) dy.
double kernel_mass(const operators::PointInteraction& op, double t, const Point& x, const quad::QuadratureSpec& spec = {},
                   operators::Dictionary dict = operators::Dictionary::EightPi);

}  // namespace puncture::heatkernel
