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

#include <array>
#include <optional>
#include <string>

#include "puncture/common.hpp"
#include "puncture/quad.hpp"
#include "puncture/sobolev.hpp"

namespace puncture::operators {

// Laplacian with a point interaction at 0, n in {2, 3}, real beta.
struct PointInteraction {
  int n = 3;
  ExtReal beta{0.0};

  PointInteraction() = default;
  PointInteraction(int n_, ExtReal beta_);
};

enum class Dictionary {
  // alpha = 8 pi / beta - 1/(4 pi) for n = 3, alpha = 8 pi / beta for n = 2.
  EightPi,
  // alpha = 1/beta - 1/(4 pi) for n = 3: the choice for which
  // u = q/(4 pi r) + alpha q + o(1) holds on the domain of A_beta.
  BoundaryCondition,
};

ExtReal alpha_from_beta(int n, ExtReal beta, Dictionary dict = Dictionary::EightPi);
ExtReal beta_from_alpha(int n, ExtReal alpha, Dictionary dict = Dictionary::EightPi);

struct EigenPair {
  double lambda;
  sobolev::Evaluable e;
  // Coefficients of e, from the closed form and the scaling identity.
  sobolev::SingularDecomposition decomposition;
};

// Delta e = lambda e off the origin and e in D(A_beta); A_beta e = -lambda e.
std::optional<EigenPair> eigenvalue(const PointInteraction& op);

struct SpectralCandidates {
  std::optional<double> closed_form;   // (1 - 4 pi / beta)^2 or e^{-2/beta}
  std::optional<double> abd_eight_pi;     // (4 pi alpha)^2 with the eight-pi dictionary
  std::optional<double> abd_boundary;  // (4 pi alpha)^2 with the boundary-condition dictionary
};
SpectralCandidates spectral_candidates(const PointInteraction& op);

// tau_beta in the G_n frame. For n = 2 the parameter enters as 2 pi beta so
// that G_{2, e^{-2/beta}} lies in the domain.
Complex boundary_functional(const sobolev::SingularDecomposition& d, const PointInteraction& op);

inline constexpr double default_membership_tol = 1e-9;

bool domain_membership(const sobolev::SingularDecomposition& d, const PointInteraction& op,
                       double tol = default_membership_tol);

// Coefficient matrix B = (beta^i_j) for n = 1: c0 = B00 f(0) + B01 f'(0), c1 = B10 f(0) + B11 f'(0).
using Matrix2c = std::array<std::array<Complex, 2>, 2>;
bool domain_membership_1d(const sobolev::SingularDecomposition& d, const Matrix2c& b,
                          double tol = default_membership_tol);

struct LaplacianOptions {
  double rel_step = 1e-3;  // h = rel_step * max(1, |x|)
  bool richardson = true;
};

Complex laplacian_fd(const sobolev::Evaluable& f, const Point& x, const LaplacianOptions& opt = {});

// x -> -c0 G_n(x) - (Delta f)(x); equals -beta f(0) G_n - Delta f on the domain.
sobolev::Evaluable apply_A_beta(const sobolev::SingularDecomposition& d, const PointInteraction& op,
                                const LaplacianOptions& opt = {}, double tol = default_membership_tol);

struct Source {
  sobolev::Evaluable h;
  bool radial = false;
  // |h(x)| <= bound * exp(-rate |x|).
  quad::DecayCertificate decay{1.0, 1.0};
};

// Number of nodes per sphere direction in the non-radial convolution.
inline constexpr int sphere_theta_nodes = 32;
inline constexpr int sphere_phi_nodes = 64;

// [R_lambda * h](x) in R^3, R_lambda(x) = e^{-sqrt(lambda)|x|} / (4 pi |x|).
Complex free_resolvent_apply(double lambda, const Source& src, const Point& x,
                             const quad::QuadratureSpec& spec = quad::QuadratureSpec::precise());

// Krein coefficient kappa in u = R_lambda * h + kappa R_lambda, fixed by
// tau_beta(u) = 0. It equals Gamma^alpha(lambda) (R_lambda * h)(0) with the
// boundary-condition dictionary.
Complex resolvent_coefficient(const PointInteraction& op, double lambda, Complex w0);

// The normalised coefficient ||R_lambda||^{-2} Gamma^alpha(lambda) w0 with
// the eight-pi dictionary; kept as a diagnostic, it matches the above only at lambda = 1.
Complex resolvent_coefficient_normalised(const PointInteraction& op, double lambda, Complex w0);

// (lambda + A_beta)^{-1} h at x, n = 3.
Complex resolvent_apply(const PointInteraction& op, double lambda, const Source& src, const Point& x,
                        const quad::QuadratureSpec& spec = quad::QuadratureSpec::precise());

// Decomposition of (lambda + A_beta)^{-1} h with an evaluable regular part.
sobolev::SingularDecomposition resolvent_decomposition(const PointInteraction& op, double lambda, const Source& src,
                                                       const quad::QuadratureSpec& spec = quad::QuadratureSpec::precise());

struct GreenResult {
  Complex value;
  std::string case_label;  // a-h; a trailing ' marks the mirrored (v, u) role
};

GreenResult green_form(const sobolev::SingularDecomposition& u, const sobolev::SingularDecomposition& v);

ExtComplex adjoint_parameter(const ExtComplex& beta);

}  // namespace puncture::operators
