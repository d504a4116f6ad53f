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

#include <string>
#include <vector>

#include "puncture/common.hpp"
#include "puncture/quad.hpp"

namespace puncture::specfun {

enum class Method { closed_form, quadrature };

inline std::string to_string(Method m) { return m == Method::closed_form ? "closed_form" : "quadrature"; }

struct KernelValue {
  double value = 0.0;
  double error_estimate = 0.0;
  Method method = Method::closed_form;
};

// Inputs closer to the origin than this are rejected for n >= 2.
inline constexpr double origin_floor = 1e-12;

// K_nu(z) from the cosh integral representation.
KernelValue macdonald_k(double nu, double z, const quad::QuadratureSpec& spec = {});
// The integral route alone, without the half-integer closed form.
KernelValue macdonald_k_integral(double nu, double z, const quad::QuadratureSpec& spec = {});

// G_n(x), the kernel of (1 - Laplacian)^{-1} on R^n.
KernelValue bessel_potential(int n, const Point& x, const quad::QuadratureSpec& spec = {});
KernelValue bessel_potential(int n, double r, const quad::QuadratureSpec& spec = {});

// G_n(x) straight from the heat-kernel subordination integral over t.
KernelValue bessel_potential_t_integral(int n, double r, const quad::QuadratureSpec& spec = {});

// G_{n,lambda}(x) = G_n(sqrt(lambda) x).
KernelValue bessel_potential_scaled(int n, double lambda, const Point& x, const quad::QuadratureSpec& spec = {});
KernelValue bessel_potential_scaled(int n, double lambda, double r, const quad::QuadratureSpec& spec = {});

// |grad G_n(x)|, differentiating the t-integral under the integral sign.
KernelValue grad_bessel_potential_norm(int n, const Point& x, const quad::QuadratureSpec& spec = {});
KernelValue grad_bessel_potential_norm(int n, double r, const quad::QuadratureSpec& spec = {});

// Components D_i G_n(x) = -(x_i / |x|) |grad G_n(x)|.
std::vector<double> grad_bessel_potential(int n, const Point& x, const quad::QuadratureSpec& spec = {});

// Free heat kernel (4 pi t)^{-n/2} exp(-|x|^2 / 4t).
double heat_kernel_free(int n, double t, const Point& x);
double heat_kernel_free(int n, double t, double r);

// Leading coefficient of G_n near the origin for n >= 3:
// G_n(x) ~ newtonian_constant(n) |x|^{2-n}.
double newtonian_constant(int n);

}  // namespace puncture::specfun
