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

#include "puncture/specfun.hpp"

#include <cmath>

namespace puncture::specfun {

namespace {

void check_dimension(int n) {
  if (n < 1) throw DomainError("dimension must be >= 1");
}

void check_radius(int n, double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("radius must be finite and >= 0");
  if (n >= 2 && r < origin_floor)
    throw SingularityError("G_n is singular at the origin for n >= 2 (|x| = " + std::to_string(r) + ")");
}

}  // namespace

KernelValue macdonald_k(double nu, double z, const quad::QuadratureSpec& spec) {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("macdonald_k requires z > 0");
  if (std::abs(nu) == 0.5) return {std::sqrt(pi / (2.0 * z)) * std::exp(-z), 0.0, Method::closed_form};
  return macdonald_k_integral(nu, z, spec);
}

KernelValue macdonald_k_integral(double nu, double z, const quad::QuadratureSpec& spec) {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("macdonald_k requires z > 0");
  const double anu = std::abs(nu);
  // Integrate exp(-z (cosh u - 1)) cosh(nu u) and restore exp(-z) at the end.
  // Convexity of cosh past u0 = asinh((|nu| + 1) / z) gives a unit-rate tail.
  const double u0 = std::asinh((anu + 1.0) / z);
  quad::DecayCertificate cert{1.0, std::exp(-z * (std::cosh(u0) - 1.0) + (anu + 1.0) * u0)};
  quad::QuadratureSpec s = spec;
  s.tail_cutoff = std::max(s.tail_cutoff, u0 + 1.0);
  auto f = [z, nu](double u) { return std::exp(-z * (2.0 * std::sinh(0.5 * u) * std::sinh(0.5 * u))) * std::cosh(nu * u); };
  const double tol = s.abs_tol > 0.0 ? s.abs_tol : 1e-20 * cert.bound;
  double upper = std::max(quad::tail_truncation(cert, tol), u0 + 1.0);
  auto r = quad::integrate_finite(f, 0.0, upper, s, quad::geometric_breaks(upper, 4));
  if (!r.converged) throw NonConvergence("macdonald_k quadrature did not converge");
  const double scale = std::exp(-z);
  return {r.value * scale, r.error_estimate * scale, Method::quadrature};
}

KernelValue bessel_potential(int n, double r, const quad::QuadratureSpec& spec) {
  check_dimension(n);
  check_radius(n, r);
  if (n == 1) return {0.5 * std::exp(-r), 0.0, Method::closed_form};
  if (n == 3) return {std::exp(-r) / (4.0 * pi * r), 0.0, Method::closed_form};
  const double nu = 0.5 * n - 1.0;
  KernelValue k = macdonald_k(nu, r, spec);
  const double pref = std::pow(2.0 * pi, -0.5 * n) * std::pow(r, -nu);
  return {pref * k.value, pref * k.error_estimate, k.method};
}

KernelValue bessel_potential(int n, const Point& x, const quad::QuadratureSpec& spec) {
  return bessel_potential(n, x.norm(), spec);
}

KernelValue bessel_potential_t_integral(int n, double r, const quad::QuadratureSpec& spec) {
  check_dimension(n);
  check_radius(n, r);
  const double c = std::pow(4.0 * pi, -0.5 * n);
  auto f = [n, r](double t) { return std::exp(-r * r / (4.0 * t) - t) * std::pow(4.0 * pi * t, -0.5 * n); };
  // For t >= 1 the integrand is below (4 pi)^{-n/2} e^{-t}.
  auto q = quad::integrate_halfline(f, spec, quad::DecayCertificate{1.0, c});
  if (!q.converged) throw NonConvergence("t-integral for G_n did not converge");
  return {q.value, q.error_estimate, Method::quadrature};
}

KernelValue bessel_potential_scaled(int n, double lambda, double r, const quad::QuadratureSpec& spec) {
  if (!(lambda > 0.0)) throw DomainError("scaled Bessel potential requires lambda > 0");
  return bessel_potential(n, std::sqrt(lambda) * r, spec);
}

KernelValue bessel_potential_scaled(int n, double lambda, const Point& x, const quad::QuadratureSpec& spec) {
  return bessel_potential_scaled(n, lambda, x.norm(), spec);
}

KernelValue grad_bessel_potential_norm(int n, double r, const quad::QuadratureSpec& spec) {
  if (n < 2) throw DomainError("gradient norm is defined here for n >= 2");
  check_radius(n, r);
  auto f = [n, r](double t) {
    return r / (2.0 * t) * std::exp(-r * r / (4.0 * t) - t) * std::pow(4.0 * pi * t, -0.5 * n);
  };
  const double c = 0.5 * r * std::pow(4.0 * pi, -0.5 * n);
  auto q = quad::integrate_halfline(f, spec, quad::DecayCertificate{1.0, c});
  if (!q.converged) throw NonConvergence("gradient quadrature did not converge");
  return {q.value, q.error_estimate, Method::quadrature};
}

KernelValue grad_bessel_potential_norm(int n, const Point& x, const quad::QuadratureSpec& spec) {
  return grad_bessel_potential_norm(n, x.norm(), spec);
}

std::vector<double> grad_bessel_potential(int n, const Point& x, const quad::QuadratureSpec& spec) {
  if (x.dim() != n) throw DomainError("point dimension does not match n");
  const double r = x.norm();
  const double g = grad_bessel_potential_norm(n, r, spec).value;
  std::vector<double> out(x.coords.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -x.coords[i] / r * g;
  return out;
}

double heat_kernel_free(int n, double t, double r) {
  if (!(t > 0.0)) throw DomainError("heat kernel requires t > 0");
  check_dimension(n);
  return std::pow(4.0 * pi * t, -0.5 * n) * std::exp(-r * r / (4.0 * t));
}

double heat_kernel_free(int n, double t, const Point& x) { return heat_kernel_free(n, t, x.norm()); }

double newtonian_constant(int n) {
  if (n < 3) throw DomainError("newtonian_constant requires n >= 3");
  return std::tgamma(0.5 * n - 1.0) / (4.0 * std::pow(pi, 0.5 * n));
}

}  // namespace puncture::specfun
