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

#include "puncture/sobolev.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "puncture/specfun.hpp"

namespace puncture::sobolev {

std::string to_string(CaseTag c) {
  switch (c) {
    case CaseTag::FullSingular: return "FullSingular";
    case CaseTag::ScalarSingular: return "ScalarSingular";
    case CaseTag::Regular: return "Regular";
  }
  return "?";
}

std::string to_string(ZeroTrace z) {
  switch (z) {
    case ZeroTrace::NoConstraint: return "NoConstraint";
    case ZeroTrace::ValueZero: return "ValueZero";
    case ZeroTrace::ValueAndGradZero: return "ValueAndGradZero";
  }
  return "?";
}

// The thresholds n/(n-1) and n/(n-2) are compared in multiplied-out form so
// that boundary exponents such as p = 3/2, n = 3 land exactly.
static bool below_first_threshold(int n, double p) { return p * (n - 1) < n; }
static bool below_second_threshold(int n, double p) { return p * (n - 2) < n; }

RepresentationCase classify(const SpaceContext& ctx) {
  ctx.validate();
  const int n = ctx.n;
  if (below_first_threshold(n, ctx.p)) return {CaseTag::FullSingular, n + 1};
  if (below_second_threshold(n, ctx.p)) return {CaseTag::ScalarSingular, 1};
  return {CaseTag::Regular, 0};
}

bool dirac_derivative_in_negative_sobolev(int order, const SpaceContext& ctx) {
  ctx.validate();
  if (order < 0) throw DomainError("derivative order must be >= 0");
  if (order == 0) return below_second_threshold(ctx.n, ctx.p);
  if (order == 1) return below_first_threshold(ctx.n, ctx.p);
  return false;
}

SingularDecomposition SingularDecomposition::scaled(Complex s) const {
  SingularDecomposition out = *this;
  out.c0 *= s;
  for (auto& ci : out.c) ci *= s;
  if (out.f0) *out.f0 *= s;
  if (out.grad_f0)
    for (auto& g : *out.grad_f0) g *= s;
  if (f_eval) {
    auto f = f_eval;
    out.f_eval = [f, s](const Point& x) { return s * f(x); };
  }
  return out;
}

SingularDecomposition decompose_1d(const OneDBoundaryData& b, double p) {
  SingularDecomposition d;
  d.ctx = SpaceContext(1, p);
  d.c0 = b.du_minus - b.du_plus;
  d.c = {b.u_minus - b.u_plus};
  d.f0 = 0.5 * (b.u_plus + b.u_minus + b.du_plus - b.du_minus);
  d.grad_f0 = std::vector<Complex>{0.5 * (b.u_plus - b.u_minus + b.du_plus + b.du_minus)};
  return d;
}

std::vector<Complex> solve_boundary_system_1d(const OneDBoundaryData& b) {
  // Unknowns (c0, c1, f0, f1); G_1(0) = 1/2, G_1'(0+-) = -+1/2, G_1''(0+-) = 1/2.
  Eigen::Matrix4cd a;
  a << 1, -1, 2, 0,
       1, 1, 2, 0,
       -1, 1, 0, 2,
       1, 1, 0, 2;
  Eigen::Vector4cd rhs(2.0 * b.u_plus, 2.0 * b.u_minus, 2.0 * b.du_plus, 2.0 * b.du_minus);
  Eigen::Vector4cd x = a.partialPivLu().solve(rhs);
  return {x(0), x(1), x(2), x(3)};
}

OneDBoundaryData recompose_1d(const SingularDecomposition& d) {
  if (d.ctx.n != 1 || d.c.size() != 1 || !d.f0 || !d.grad_f0)
    throw ContractViolation("recompose_1d needs a complete n = 1 decomposition");
  const Complex c0 = d.c0, c1 = d.c[0], f0 = *d.f0, f1 = (*d.grad_f0)[0];
  return {0.5 * c0 - 0.5 * c1 + f0, 0.5 * c0 + 0.5 * c1 + f0, -0.5 * c0 + 0.5 * c1 + f1, 0.5 * c0 + 0.5 * c1 + f1};
}

std::vector<double> default_radii() {
  std::vector<double> r;
  for (int k = 4; k <= 20; ++k) r.push_back(std::ldexp(1.0, -k));
  return r;
}

namespace {

void require_limit_regime(const SpaceContext& ctx) {
  if (classify(ctx).tag != CaseTag::ScalarSingular || !ctx.has_point_value())
    throw ContractViolation("limit extraction needs the scalar-singular case with p > n/2");
}

void require_radii(const std::vector<double>& radii) {
  if (radii.size() < 5) throw ContractViolation("limit extraction needs at least 5 radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw ContractViolation("radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw ContractViolation("radii must be strictly decreasing");
  }
}

double g_n(int n, double r) { return specfun::bessel_potential(n, r, quad::QuadratureSpec::precise()).value; }

// Mean of u over the two points +-r e_1; removes the linear part of f.
Complex symmetric_sample(const Evaluable& u, int n, double r) {
  Point a = Point::radial(n, r);
  Point b = Point::radial(n, -r);
  return 0.5 * (u(a) + u(b));
}

// Polynomial extrapolation to h = 0 through the given points (Neville).
Complex neville_at_zero(const std::vector<double>& h, const std::vector<Complex>& y) {
  std::vector<Complex> t = y;
  const std::size_t m = t.size();
  for (std::size_t k = 1; k < m; ++k)
    for (std::size_t i = 0; i + k < m; ++i)
      t[i] = (h[i + k] * t[i] - h[i] * t[i + 1]) / (h[i + k] - h[i]);
  return t[0];
}

LimitEstimate finish(const std::vector<double>& h, const std::vector<Complex>& seq, const char* what) {
  const std::size_t m = seq.size();
  LimitEstimate est;
  est.sequence = seq;
  std::vector<double> h3(h.end() - 3, h.end()), h2(h.end() - 2, h.end());
  std::vector<Complex> y3(seq.end() - 3, seq.end()), y2(seq.end() - 2, seq.end());
  est.value = neville_at_zero(h3, y3);
  est.error_estimate = std::abs(est.value - neville_at_zero(h2, y2));

  std::vector<double> delta;
  for (std::size_t i = 0; i + 1 < m; ++i) delta.push_back(std::abs(seq[i + 1] - seq[i]));
  const std::size_t k = delta.size();
  est.convergence_ratio = delta[k - 2] > 0.0 ? delta[k - 1] / delta[k - 2] : 0.0;

  const double scale = std::max(1.0, std::abs(seq.back()));
  bool settled = delta[k - 1] <= 1e-6 * scale;
  bool contracting = true;
  for (std::size_t i = k - 3; i < k; ++i)
    if (delta[i - 1] > 0.0 && delta[i] / delta[i - 1] >= 0.9) contracting = false;
  if (!settled && !contracting)
    throw NonConvergence(std::string(what) + ": ratio sequence does not converge (last ratio " +
                         std::to_string(est.convergence_ratio) + "); input is likely not in the space");
  return est;
}

}  // namespace

LimitEstimate extract_c0_by_limit(const Evaluable& u, const SpaceContext& ctx, const std::vector<double>& radii) {
  require_limit_regime(ctx);
  require_radii(radii);
  const int n = ctx.n;
  std::vector<Complex> s;
  std::vector<double> g;
  for (double r : radii) {
    s.push_back(symmetric_sample(u, n, r));
    g.push_back(g_n(n, r));
  }
  // Successive quotients cancel f(0); the remaining error is O(r).
  std::vector<Complex> d;
  std::vector<double> h;
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
    d.push_back((s[k] - s[k + 1]) / (g[k] - g[k + 1]));
    h.push_back(radii[k]);
  }
  return finish(h, d, "extract_c0_by_limit");
}

LimitEstimate extract_f0(const Evaluable& u, Complex c0, const SpaceContext& ctx, const std::vector<double>& radii) {
  require_limit_regime(ctx);
  require_radii(radii);
  std::vector<Complex> seq;
  for (double r : radii) seq.push_back(symmetric_sample(u, ctx.n, r) - c0 * g_n(ctx.n, r));
  return finish(radii, seq, "extract_f0");
}

SingularDecomposition decompose_by_limits(const Evaluable& u, const SpaceContext& ctx, const std::vector<double>& radii) {
  const Complex c0 = extract_c0_by_limit(u, ctx, radii).value;
  const Complex f0 = extract_f0(u, c0, ctx, radii).value;
  SingularDecomposition d;
  d.ctx = ctx;
  d.c0 = c0;
  d.c.assign(static_cast<std::size_t>(ctx.n), Complex{});
  d.f0 = f0;
  const int n = ctx.n;
  d.f_eval = [u, c0, f0, n](const Point& x) {
    const double r = x.norm();
    if (r < specfun::origin_floor) return f0;
    return u(x) - c0 * g_n(n, r);
  };
  return d;
}

ScalingShift scaling_shift(int n, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("scaling_shift requires lambda > 0");
  if (n == 2) return {1.0, 0.5 * std::log(lambda)};
  if (n == 3) {
    const double s = std::sqrt(lambda);
    return {s, -(1.0 - s) / (4.0 * pi)};
  }
  throw Unsupported("scaling_shift is defined for n in {2, 3}");
}

static Complex required_f0(const SingularDecomposition& d) {
  if (!d.f0) throw ContractViolation("f(0) is undefined for this decomposition (p <= n/2)");
  return *d.f0;
}

Complex tau_beta(const SingularDecomposition& d, const ExtComplex& beta) {
  const Complex f0 = required_f0(d);
  if (beta.is_infinite()) return -f0;
  return d.c0 - beta.value() * f0;
}

Complex tau_beta_lambda(const SingularDecomposition& d, Complex beta, double lambda) {
  const Complex f0 = required_f0(d);
  const ScalingShift s = scaling_shift(d.ctx.n, lambda);
  const Complex c0l = s.c0_factor * d.c0;
  const Complex f0l = f0 + s.f0_shift_per_unit_c0 * d.c0;
  return c0l - beta * f0l;
}

Complex tau_beta_lambda_convert(int n, Complex beta, double lambda, ConvertDirection dir) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be > 0");
  constexpr double tiny = 1e-14;
  Complex denom;
  if (n == 2) {
    const double half_log = 0.5 * std::log(lambda);
    denom = dir == ConvertDirection::ToOriginal ? 1.0 - beta * half_log : 1.0 + beta * half_log;
    if (std::abs(denom) <= tiny * std::max(1.0, std::abs(beta * half_log)))
      throw PoleError("excluded parameter: beta = 2 / log(lambda)");
    return beta / denom;
  }
  if (n == 3) {
    const double s = std::sqrt(lambda);
    const double k = (1.0 - s) / (4.0 * pi);
    if (dir == ConvertDirection::ToOriginal) {
      denom = s + beta * k;
      if (std::abs(denom) <= tiny * std::max(s, std::abs(beta * k)))
        throw PoleError("excluded parameter: beta = -4 pi sqrt(lambda) / (1 - sqrt(lambda))");
      return beta / denom;
    }
    denom = 1.0 - beta * k;
    if (std::abs(denom) <= tiny * std::max(1.0, std::abs(beta * k)))
      throw PoleError("inverse conversion is singular for this beta_lambda");
    return s * beta / denom;
  }
  throw Unsupported("tau_beta_lambda_convert is defined for n in {2, 3}");
}

ZeroTrace zero_trace_case(const SpaceContext& ctx) {
  ctx.validate();
  if (2.0 * ctx.p <= ctx.n) return ZeroTrace::NoConstraint;
  if (ctx.p <= ctx.n) return ZeroTrace::ValueZero;
  return ZeroTrace::ValueAndGradZero;
}

bool friedrichs_unique(const SpaceContext& ctx) {
  ctx.validate();
  return ctx.n >= 3 && 2.0 * ctx.p <= ctx.n;
}

bool singleton_polar(int m, const SpaceContext& ctx) {
  ctx.validate();
  if (m < 1) throw DomainError("smoothness order m must be >= 1");
  return m * ctx.p <= ctx.n;
}

}  // namespace puncture::sobolev
