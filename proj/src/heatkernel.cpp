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

#include "puncture/heatkernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace puncture::heatkernel {

using operators::Dictionary;
using operators::PointInteraction;
using operators::Source;
using specfun::Method;

namespace {

void require_3d(const Point& p, const char* what) {
  if (p.dim() != 3) throw Unsupported(std::string(what) + ": the heat kernel is implemented for n = 3");
}

void require_nonzero(const Point& p, const char* what) {
  if (p.norm() < specfun::origin_floor) throw SingularityError(std::string(what) + " must be away from the origin");
}

// Bound exp(-b u - u^2/4t) <= C exp(-rate u) with rate >= 1/sqrt(t).
quad::DecayCertificate gauss_exp_certificate(double b, double t) {
  const double rate = std::max(b, 1.0 / std::sqrt(t));
  const double excess = std::max(0.0, rate - b);
  return {rate, std::exp(excess * excess * t)};
}

// K_t(rho) = int_0^inf (u / 2t) exp(-b u - u^2 / 4t) du, b = a + rho / 2t.
KernelValue k_integral(double a, double t, double rho, const quad::QuadratureSpec& spec) {
  const double b = a + rho / (2.0 * t);
  auto cert = gauss_exp_certificate(b, t);
  // u e^{-rate u / 2} <= 2 / (rate e).
  cert.bound *= 1.0 / (t * cert.rate * std::exp(1.0));
  cert.rate *= 0.5;
  auto r = quad::integrate_halfline([&](double u) { return u / (2.0 * t) * std::exp(-b * u - u * u / (4.0 * t)); }, spec, cert);
  if (!r.converged) throw NonConvergence("heat kernel u-integral did not converge");
  return {r.value, r.error_estimate, Method::quadrature};
}

ExtReal alpha_of(const PointInteraction& op, Dictionary dict) {
  if (op.n != 3) throw Unsupported("the heat kernel is implemented for n = 3");
  return operators::alpha_from_beta(3, op.beta, dict);
}

// F(rho) = P(t, rho) (1 - a J_t(rho)).
KernelValue profile(double a, double t, double rho, const quad::QuadratureSpec& spec) {
  const double p = gaussian(t, rho);
  const auto att = attenuation(a, t, rho, spec);
  return {p * att.value, p * att.error_estimate, att.method};
}

// 3-point Neville extrapolation to 0 from the last entries of (h, v).
double neville_at_zero(const double* h, const double* v, int m) {
  double p[3];
  for (int i = 0; i < m; ++i) p[i] = v[i];
  for (int level = 1; level < m; ++level)
    for (int i = 0; i + level < m; ++i)
      p[i] = (h[i + level] * p[i] - h[i] * p[i + 1]) / (h[i + level] - h[i]);
  return p[0];
}

}  // namespace

void HeatKernelQuery::validate() const {
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  if (op.n != 3) throw Unsupported("the heat kernel is implemented for n = 3");
  require_3d(x, "x");
  require_3d(y, "y");
  require_nonzero(x, "x");
  require_nonzero(y, "y");
}

double gaussian(double t, double r) { return std::pow(4.0 * pi * t, -1.5) * std::exp(-r * r / (4.0 * t)); }

KernelValue j_integral(double a, double t, double rho, const quad::QuadratureSpec& spec) {
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  const double b = a + rho / (2.0 * t);
  auto r = quad::integrate_halfline([&](double u) { return std::exp(-b * u - u * u / (4.0 * t)); }, spec,
                                    gauss_exp_certificate(b, t));
  if (!r.converged) throw NonConvergence("heat kernel u-integral did not converge");
  return {r.value, r.error_estimate, Method::quadrature};
}

KernelValue attenuation(double a, double t, double rho, const quad::QuadratureSpec& spec) {
  if (a == 0.0) return {1.0, 0.0, Method::closed_form};
  if (a < 0.0) {
    const auto j = j_integral(a, t, rho, spec);
    return {1.0 - a * j.value, std::abs(a) * j.error_estimate, Method::quadrature};
  }
  // Integrating by parts, b J = 1 - K, so 1 - a J = (rho / 2t) / b + (a / b) K with both terms positive.
  const double b = a + rho / (2.0 * t);
  const auto k = k_integral(a, t, rho, spec);
  return {rho / (2.0 * t) / b + a / b * k.value, a / b * k.error_estimate, Method::quadrature};
}

KernelValue heat_kernel_alpha(double t, const Point& x, const Point& y, ExtReal alpha, const quad::QuadratureSpec& spec) {
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  require_3d(x, "x");
  require_3d(y, "y");
  require_nonzero(x, "x");
  require_nonzero(y, "y");
  const double free = gaussian(t, (x - y).norm());
  if (alpha.is_infinite()) return {free, 0.0, Method::closed_form};
  const double rx = x.norm(), ry = y.norm();
  const auto f = profile(4.0 * pi * alpha.value(), t, rx + ry, spec);
  const double s = 2.0 * t / (rx * ry);
  return {free + s * f.value, s * f.error_estimate, Method::quadrature};
}

KernelValue heat_kernel_beta(const HeatKernelQuery& q, const quad::QuadratureSpec& spec, Dictionary dict) {
  q.validate();
  return heat_kernel_alpha(q.t, q.x, q.y, alpha_of(q.op, dict), spec);
}

KernelValue r_beta(double t, const Point& y, const PointInteraction& op, const quad::QuadratureSpec& spec, Dictionary dict) {
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  require_3d(y, "y");
  require_nonzero(y, "y");
  const ExtReal alpha = alpha_of(op, dict);
  if (alpha.is_infinite()) return {0.0, 0.0, Method::closed_form};
  const double ry = y.norm();
  const auto f = profile(4.0 * pi * alpha.value(), t, ry, spec);
  const double s = 8.0 * pi * t / ry;
  return {s * f.value, s * f.error_estimate, f.method};
}

LimitDiagnostic r_beta_limit(double t, const Point& y, const PointInteraction& op, const quad::QuadratureSpec& spec,
                             int k_min, int k_max, Dictionary dict) {
  if (k_max - k_min < 3) throw ContractViolation("r_beta_limit needs at least four radii");
  const ExtReal alpha = alpha_of(op, dict);
  LimitDiagnostic d{};
  std::vector<double> h;
  const double c = 1.0 / std::sqrt(3.0);
  for (int k = k_min; k <= k_max; ++k) {
    const double r = std::ldexp(1.0, -k);
    const Point x{r * c, r * c, r * c};
    const double g3 = std::exp(-r) / (4.0 * pi * r);
    d.ratios.push_back(heat_kernel_alpha(t, x, y, alpha, spec).value / g3);
    h.push_back(r);
  }
  const std::size_t m = d.ratios.size();
  d.value = neville_at_zero(&h[m - 3], &d.ratios[m - 3], 3);
  const double two = neville_at_zero(&h[m - 2], &d.ratios[m - 2], 2);
  d.error_estimate = std::abs(d.value - two);
  d.monotone = true;
  for (std::size_t i = 1; i < m; ++i) {
    const double prev = d.ratios[i - 1] - d.value, cur = d.ratios[i] - d.value;
    // Ignore gaps already at the extrapolation error.
    if (std::abs(cur) <= 10.0 * d.error_estimate) continue;
    if (!(std::abs(cur) < std::abs(prev)) || prev * cur < 0.0) d.monotone = false;
  }
  return d;
}

double c_lower_bound(double alpha, double T, const quad::QuadratureSpec& spec) {
  if (!(T > 0.0)) throw DomainError("c_lower_bound needs T > 0");
  if (alpha == 0.0) return 1.0;
  const double a = 4.0 * pi * std::abs(alpha);
  auto r = quad::integrate_halfline([&](double u) { return std::exp(-a * u - u * u / (4.0 * T)); }, spec,
                                    gauss_exp_certificate(a, T));
  if (!r.converged) throw NonConvergence("c_lower_bound integral did not converge");
  return 1.0 - 4.0 * pi * alpha * r.value;
}

double envelope(double t, const Point& y) {
  const double ry = y.norm();
  if (!(t > 0.0)) throw DomainError("envelope needs t > 0");
  if (ry < specfun::origin_floor) throw SingularityError("envelope is singular at y = 0");
  const double inner = ry <= 1.0 ? std::pow(4.0 * pi * t, -1.5) : 0.0;
  return 4.0 * pi * std::exp(1.0) * (inner + gaussian(t, ry - 1.0) + 2.0 * t / ry * gaussian(t, ry));
}

KernelTrace kernel_trace(double t, const Point& y, ExtReal alpha, const quad::QuadratureSpec& spec) {
  require_nonzero(y, "y");
  const double ry = y.norm();
  if (alpha.is_infinite()) return {0.0, gaussian(t, ry)};
  const double a = 4.0 * pi * alpha.value();
  const double p = gaussian(t, ry);
  const double att = attenuation(a, t, ry, spec).value;
  // F'(rho) = P (a K - (rho / 2t)(1 - a J)).
  const double k = a == 0.0 ? 0.0 : k_integral(a, t, ry, spec).value;
  const double f = p * att, df = p * (a * k - ry / (2.0 * t) * att);
  return {8.0 * pi * t / ry * f, p + 2.0 * t / ry * (df + f)};
}

sobolev::SingularDecomposition dirichlet_map(Complex gamma, int n) {
  if (n < 1) throw DomainError("dimension n must be >= 1");
  sobolev::SingularDecomposition d;
  // Any exponent of the singular cases; f = 0 has point values in every space.
  d.ctx = sobolev::SpaceContext(n, n <= 3 ? 2.0 : n / (n - 1.0));
  d.c0 = gamma;
  d.c.assign(static_cast<std::size_t>(n), 0.0);
  d.f0 = 0.0;
  d.grad_f0 = std::vector<Complex>(static_cast<std::size_t>(n), 0.0);
  d.f_eval = [](const Point&) { return Complex(0.0); };
  return d;
}

double dirichlet_response(const PointInteraction& op, double t, double gamma, const Point& x, const quad::QuadratureSpec& spec) {
  if (op.beta.is_infinite()) throw Unsupported("the boundary response needs a finite beta");
  const double b = op.beta.value();
  if (b == 0.0) return gamma * gaussian(t, x.norm());
  return gamma / b * r_beta(t, x, op, spec).value;
}

namespace {

// Sum over the 32 x 64 sphere rule of v(s w).
double sphere_sum(const Source& v, double s, const std::function<double(const Point&)>& weight) {
  const auto& gl = quad::gauss_legendre(operators::sphere_theta_nodes);
  const int m = operators::sphere_phi_nodes;
  double total = 0.0;
  for (std::size_t i = 0; i < gl.x.size(); ++i) {
    const double mu = gl.x[i], st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    double ring = 0.0;
    for (int j = 0; j < m; ++j) {
      const double phi = 2.0 * pi * j / m;
      const Point y{s * st * std::cos(phi), s * st * std::sin(phi), s * mu};
      ring += weight(y) * v.h(y).real();
    }
    total += gl.w[i] * ring * (2.0 * pi / m);
  }
  return total;
}

double split_halfline(const std::function<double(double)>& f, double split, const quad::QuadratureSpec& spec,
                      quad::DecayCertificate tail) {
  double total = 0.0;
  if (split > 0.0) {
    auto a = quad::integrate_finite(f, 0.0, split, spec);
    if (!a.converged) throw NonConvergence("semigroup integral did not converge");
    total += a.value;
  }
  auto b = quad::integrate_halfline([&](double u) { return f(split + u); }, spec, tail);
  if (!b.converged) throw NonConvergence("semigroup integral did not converge");
  return total + b.value;
}

}  // namespace

double semigroup_apply(const PointInteraction& op, double t, const Source& v, const Point& x, const quad::QuadratureSpec& spec,
                       Dictionary dict) {
  if (!(t > 0.0)) throw DomainError("semigroup needs t > 0");
  require_3d(x, "x");
  const ExtReal alpha = alpha_of(op, dict);
  const double r = x.norm();
  const double c = v.decay.rate, B = v.decay.bound, e = std::exp(1.0);
  if (alpha.is_finite()) require_nonzero(x, "x");
  const double a = alpha.is_finite() ? 4.0 * pi * alpha.value() : 0.0;
  auto extra = [&](double s) { return alpha.is_finite() ? 8.0 * pi * t * profile(a, t, r + s, spec).value : 0.0; };
  const double f_max = alpha.is_finite() ? profile(a, t, r, spec).value : 0.0;

  if (v.radial) {
    auto g = [&v](double s) { return v.h(Point::radial(3, s)).real(); };
    if (r < specfun::origin_floor) {
      // Free heat kernel at the origin.
      auto f = [&](double s) { return 4.0 * pi * s * s * g(s) * gaussian(t, s); };
      const quad::DecayCertificate cert{0.5 * c, 4.0 * pi * B * std::pow(4.0 * pi * t, -1.5) * std::pow(4.0 / (c * e), 2)};
      return split_halfline(f, 0.0, spec, cert);
    }
    // s v(s) / r [ (4 pi t)^{-1/2} e^{-(r-s)^2/4t} (1 - e^{-rs/t}) + 8 pi t F(r + s) ].
    auto f = [&](double s) {
      const double mean = std::pow(4.0 * pi * t, -0.5) * std::exp(-(r - s) * (r - s) / (4.0 * t)) * -std::expm1(-r * s / t);
      return s * g(s) / r * (mean + extra(s));
    };
    const double m = std::pow(4.0 * pi * t, -0.5) + 8.0 * pi * t * f_max;
    const quad::DecayCertificate cert{0.5 * c, B * std::exp(-c * r) * m * (r + 2.0 / (c * e)) / r};
    return split_halfline(f, r, spec, cert);
  }

  auto f = [&](double s) {
    if (s == 0.0) return 0.0;
    const double free = sphere_sum(v, s, [&](const Point& y) { return gaussian(t, (x - y).norm()); });
    if (alpha.is_infinite()) return s * s * free;
    const double mean = sphere_sum(v, s, [](const Point&) { return 1.0; });
    return s * s * free + s / r * 2.0 * t * profile(a, t, r + s, spec).value * mean;
  };
  const double bound =
      4.0 * pi * B * (std::pow(4.0 * pi * t, -1.5) * std::pow(4.0 / (c * e), 2) + (r > 0.0 ? 2.0 * t * f_max / r : 0.0) * 2.0 / (c * e));
  return split_halfline(f, r, spec, {0.5 * c, bound});
}

double boundary_response(const PointInteraction& op, double t, const Source& v, const quad::QuadratureSpec& spec,
                         Dictionary dict) {
  if (!(t > 0.0)) throw DomainError("semigroup needs t > 0");
  const ExtReal alpha = alpha_of(op, dict);
  if (alpha.is_infinite()) return 0.0;
  const double a = 4.0 * pi * alpha.value();
  const double c = v.decay.rate, B = v.decay.bound, e = std::exp(1.0);
  // s^2 R(t, s) = 8 pi t s F(s); F(s) <= F(0).
  const double f0 = std::pow(4.0 * pi * t, -1.5) * attenuation(a, t, 0.0, spec).value;
  const quad::DecayCertificate cert{0.5 * c, 32.0 * pi * pi * t * B * f0 * 2.0 / (c * e)};
  std::function<double(double)> f;
  if (v.radial) {
    f = [&](double s) { return 32.0 * pi * pi * t * s * profile(a, t, s, spec).value * v.h(Point::radial(3, s)).real(); };
  } else {
    f = [&](double s) {
      if (s == 0.0) return 0.0;
      return 8.0 * pi * t * s * profile(a, t, s, spec).value * sphere_sum(v, s, [](const Point&) { return 1.0; });
    };
  }
  return split_halfline(f, 0.0, spec, cert);
}

double kernel_mass(const PointInteraction& op, double t, const Point& x, const quad::QuadratureSpec& spec, Dictionary dict) {
  if (!(t > 0.0)) throw DomainError("kernel_mass needs t > 0");
  require_3d(x, "x");
  const ExtReal alpha = alpha_of(op, dict);
  if (alpha.is_infinite()) return 1.0;
  require_nonzero(x, "x");
  const double r = x.norm(), a = 4.0 * pi * alpha.value();
  const double att = attenuation(a, t, r, spec).value;
  const quad::DecayCertificate cert{0.5 / std::sqrt(t), 2.0 * std::sqrt(t) * std::pow(4.0 * pi * t, -1.5) * att};
  auto f = [&](double s) { return s * profile(a, t, r + s, spec).value; };
  return 1.0 + 8.0 * pi * t / r * split_halfline(f, 0.0, spec, cert);
}

}  // namespace puncture::heatkernel
