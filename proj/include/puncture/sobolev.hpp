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

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "puncture/common.hpp"
#include "puncture/quad.hpp"

namespace puncture::sobolev {

struct SpaceContext {
  int n = 1;
  double p = 2.0;

  SpaceContext() = default;
  SpaceContext(int n_, double p_) : n(n_), p(p_) { validate(); }

  double q() const { return p / (p - 1.0); }
  void validate() const {
    if (n < 1) throw DomainError("dimension n must be >= 1");
    if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("exponent p must lie in (1, inf)");
  }
  // W^{2,p} embeds into continuous functions.
  bool has_point_value() const { return 2.0 * p > n; }
  // W^{2,p} embeds into C^1.
  bool has_point_gradient() const { return p > n; }
};

enum class CaseTag { FullSingular, ScalarSingular, Regular };

std::string to_string(CaseTag c);

struct RepresentationCase {
  CaseTag tag;
  int singular_dim;
};

RepresentationCase classify(const SpaceContext& ctx);

bool dirac_derivative_in_negative_sobolev(int order, const SpaceContext& ctx);

using Evaluable = std::function<Complex(const Point&)>;

// u = c0 G_n + sum_i c_i D_i G_n + f.
struct SingularDecomposition {
  SpaceContext ctx;
  Complex c0{};
  std::vector<Complex> c;
  std::optional<Complex> f0;
  std::optional<std::vector<Complex>> grad_f0;
  Evaluable f_eval;

  SingularDecomposition scaled(Complex s) const;
};

struct OneDBoundaryData {
  Complex u_plus{}, u_minus{}, du_plus{}, du_minus{};
};

// Closed-form solution of the n = 1 boundary system.
SingularDecomposition decompose_1d(const OneDBoundaryData& b, double p = 2.0);
// The same coefficients obtained by solving the 4x4 linear system; returns
// (c0, c1, f0, f1).
std::vector<Complex> solve_boundary_system_1d(const OneDBoundaryData& b);
// One-sided values of u = c0 G_1 + c1 G_1' + f at the origin.
OneDBoundaryData recompose_1d(const SingularDecomposition& d);

struct LimitEstimate {
  Complex value{};
  double error_estimate = 0.0;
  double convergence_ratio = 0.0;
  std::vector<Complex> sequence;
};

std::vector<double> default_radii();

// c0 = lim u / G_n, extracted from the two-term model u ~ c0 G_n + f(0).
LimitEstimate extract_c0_by_limit(const Evaluable& u, const SpaceContext& ctx,
                                  const std::vector<double>& radii = default_radii());
// f(0) = lim (u - c0 G_n).
LimitEstimate extract_f0(const Evaluable& u, Complex c0, const SpaceContext& ctx,
                         const std::vector<double>& radii = default_radii());
// Both coefficients plus an evaluable regular part.
SingularDecomposition decompose_by_limits(const Evaluable& u, const SpaceContext& ctx,
                                          const std::vector<double>& radii = default_radii());

struct ScalingShift {
  double c0_factor;
  double f0_shift_per_unit_c0;
};
ScalingShift scaling_shift(int n, double lambda);

Complex tau_beta(const SingularDecomposition& d, const ExtComplex& beta);
// c0^lambda - beta f^lambda(0), using scaling_shift to change frames.
Complex tau_beta_lambda(const SingularDecomposition& d, Complex beta, double lambda);

enum class ConvertDirection { ToOriginal, ToLambda };
// ToOriginal maps the lambda-frame parameter beta to beta_lambda; ToLambda inverts.
Complex tau_beta_lambda_convert(int n, Complex beta, double lambda, ConvertDirection dir = ConvertDirection::ToOriginal);

enum class ZeroTrace { NoConstraint, ValueZero, ValueAndGradZero };
std::string to_string(ZeroTrace z);
ZeroTrace zero_trace_case(const SpaceContext& ctx);

bool friedrichs_unique(const SpaceContext& ctx);
bool singleton_polar(int m, const SpaceContext& ctx);

}  // namespace puncture::sobolev
