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

#include "puncture/operators.hpp"

#include <cmath>
#include <limits>

#include "puncture/specfun.hpp"

namespace puncture::operators {

using sobolev::CaseTag;
using sobolev::Evaluable;
using sobolev::SingularDecomposition;
using sobolev::SpaceContext;

namespace {

constexpr double inv4pi = 1.0 / (4.0 * pi);

void check_dim(int n) {
  if (n != 2 && n != 3) throw DomainError("point interactions are implemented for n in {2, 3}");
}

// (e^{-k r} - e^{-r}) / (4 pi r), continued by (1 - k) / (4 pi) at 0.
double yukawa_minus_g3(double k, double r) {
  if (r < specfun::origin_floor) return (1.0 - k) * inv4pi;
  return std::exp(-r) * std::expm1(-(k - 1.0) * r) / (4.0 * pi * r);
}

double yukawa(double k, double r) { return std::exp(-k * r) / (4.0 * pi * r); }

}  // namespace

PointInteraction::PointInteraction(int n_, ExtReal beta_) : n(n_), beta(beta_) {
  check_dim(n);
  if (beta.is_finite() && !std::isfinite(beta.value())) throw DomainError("beta must be finite or the point at infinity");
}

ExtReal alpha_from_beta(int n, ExtReal beta, Dictionary dict) {
  check_dim(n);
  if (beta.is_infinite()) return n == 3 ? ExtReal(-inv4pi) : ExtReal(0.0);
  const double b = beta.value();
  if (b == 0.0) return ExtReal::infinity();
  if (n == 2) return ExtReal(8.0 * pi / b);
  return dict == Dictionary::EightPi ? ExtReal(8.0 * pi / b - inv4pi) : ExtReal(1.0 / b - inv4pi);
}

ExtReal beta_from_alpha(int n, ExtReal alpha, Dictionary dict) {
  check_dim(n);
  if (alpha.is_infinite()) return ExtReal(0.0);
  const double a = alpha.value();
  if (n == 2) return a == 0.0 ? ExtReal::infinity() : ExtReal(8.0 * pi / a);
  const double s = a + inv4pi;
  if (s == 0.0) return ExtReal::infinity();
  return dict == Dictionary::EightPi ? ExtReal(8.0 * pi / s) : ExtReal(1.0 / s);
}

std::optional<EigenPair> eigenvalue(const PointInteraction& p) {
  SingularDecomposition d;
  d.ctx = SpaceContext(p.n, 2.0);
  d.c0 = 1.0;
  d.c.assign(static_cast<std::size_t>(p.n), 0.0);
  if (p.n == 2) {
    if (p.beta.is_infinite() || p.beta.value() == 0.0) return std::nullopt;
    const double b = p.beta.value();
    const double lambda = std::exp(-2.0 / b);
    const auto spec = quad::QuadratureSpec::precise();
    // f(0) of G_{2,lambda} in the G_2 frame is -log(lambda) / (4 pi) = 1 / (2 pi beta).
    d.f0 = Complex(1.0 / (2.0 * pi * b));
    const Complex f0 = *d.f0;
    d.f_eval = [lambda, spec, f0](const Point& x) {
      const double r = x.norm();
      if (r < specfun::origin_floor) return f0;
      return Complex(specfun::bessel_potential_scaled(2, lambda, r, spec).value - specfun::bessel_potential(2, r, spec).value);
    };
    Evaluable e = [lambda, spec](const Point& x) {
      return Complex(specfun::bessel_potential_scaled(2, lambda, x, spec).value);
    };
    return EigenPair{lambda, e, d};
  }
  // n = 3: beta in (-inf, 0) or (4 pi, inf].
  double k = 1.0;
  if (p.beta.is_finite()) {
    const double b = p.beta.value();
    if (!(b < 0.0 || b > 4.0 * pi)) return std::nullopt;
    k = 1.0 - 4.0 * pi / b;
  }
  d.f0 = Complex((1.0 - k) * inv4pi);
  d.f_eval = [k](const Point& x) { return Complex(yukawa_minus_g3(k, x.norm())); };
  Evaluable e = [k](const Point& x) {
    const double r = x.norm();
    if (r < specfun::origin_floor) throw SingularityError("eigenfunction is singular at the origin");
    return Complex(yukawa(k, r));
  };
  return EigenPair{k * k, e, d};
}

SpectralCandidates spectral_candidates(const PointInteraction& p) {
  SpectralCandidates s;
  if (auto e = eigenvalue(p)) s.closed_form = e->lambda;
  if (p.n == 3) {
    for (auto dict : {Dictionary::EightPi, Dictionary::BoundaryCondition}) {
      const ExtReal a = alpha_from_beta(3, p.beta, dict);
      // A negative eigenvalue -(4 pi alpha)^2 exists only for alpha < 0.
      if (a.is_infinite() || !(a.value() < 0.0)) continue;
      const double v = std::pow(4.0 * pi * a.value(), 2);
      (dict == Dictionary::EightPi ? s.abd_eight_pi : s.abd_boundary) = v;
    }
  }
  return s;
}

Complex boundary_functional(const SingularDecomposition& d, const PointInteraction& p) {
  if (!d.f0) throw ContractViolation("boundary functional needs f(0)");
  if (p.beta.is_infinite()) return -*d.f0;
  const double b = p.n == 2 ? 2.0 * pi * p.beta.value() : p.beta.value();
  return d.c0 - b * *d.f0;
}

bool domain_membership(const SingularDecomposition& d, const PointInteraction& p, double tol) {
  if (d.ctx.n != p.n) throw ContractViolation("decomposition and operator dimensions differ");
  if (sobolev::classify(d.ctx).tag != CaseTag::ScalarSingular)
    throw ContractViolation("domain membership needs the scalar singular case");
  return std::abs(boundary_functional(d, p)) <= tol;
}

bool domain_membership_1d(const SingularDecomposition& d, const Matrix2c& b, double tol) {
  if (d.ctx.n != 1 || !d.f0 || !d.grad_f0 || d.c.empty())
    throw ContractViolation("domain_membership_1d needs a one-dimensional decomposition");
  const Complex f0 = *d.f0, f1 = (*d.grad_f0)[0];
  const Complex r0 = d.c0 - (b[0][0] * f0 + b[0][1] * f1);
  const Complex r1 = d.c[0] - (b[1][0] * f0 + b[1][1] * f1);
  return std::abs(r0) <= tol && std::abs(r1) <= tol;
}

Complex laplacian_fd(const Evaluable& f, const Point& x, const LaplacianOptions& opt) {
  const double h = opt.rel_step * std::max(1.0, x.norm());
  const Complex fx = f(x);
  auto central = [&](double step) {
    Complex s = 0.0;
    for (int i = 0; i < x.dim(); ++i) {
      Point a = x, b = x;
      a.coords[i] += step;
      b.coords[i] -= step;
      s += f(a) - 2.0 * fx + f(b);
    }
    return s / (step * step);
  };
  const Complex l1 = central(h);
  if (!opt.richardson) return l1;
  return (4.0 * l1 - central(2.0 * h)) / 3.0;
}

Evaluable apply_A_beta(const SingularDecomposition& d, const PointInteraction& p, const LaplacianOptions& opt,
                       double tol) {
  if (!domain_membership(d, p, tol)) throw DomainError("u is not in the domain of A_beta");
  if (!d.f_eval) throw ContractViolation("apply_A_beta needs an evaluable regular part");
  const int n = p.n;
  const Complex c0 = d.c0;
  const Evaluable f = d.f_eval;
  const auto spec = quad::QuadratureSpec::precise();
  return [n, c0, f, opt, spec](const Point& x) {
    const Complex g = c0 == Complex(0.0) ? Complex(0.0) : Complex(specfun::bessel_potential(n, x, spec).value);
    return -c0 * g - laplacian_fd(f, x, opt);
  };
}

Complex free_resolvent_apply(double lambda, const Source& src, const Point& x, const quad::QuadratureSpec& spec) {
  if (!(lambda > 0.0)) throw DomainError("resolvent needs lambda > 0");
  if (x.dim() != 3) throw Unsupported("the resolvent is implemented for n = 3");
  const double k = std::sqrt(lambda);
  const double a = k + src.decay.rate;
  const double r = x.norm();
  auto fail = [](const char* what) { throw NonConvergence(what); };

  if (src.radial) {
    const Evaluable h = src.h;
    auto g = [&h](double s) { return h(Point::radial(3, s)); };
    if (r < specfun::origin_floor) {
      auto res = quad::integrate_halfline([&](double s) { return s * g(s) * std::exp(-k * s); }, spec,
                                          quad::DecayCertificate{0.5 * a, src.decay.bound * 2.0 / (a * std::exp(1.0))});
      if (!res.converged) fail("radial resolvent integral did not converge");
      return res.value;
    }
    // s h(s) (e^{-k|r-s|} - e^{-k(r+s)}) / (2 k r), split at the kink s = r.
    auto kern = [&](double s) {
      return s * g(s) * std::exp(-k * std::abs(r - s)) * -std::expm1(-2.0 * k * std::min(r, s)) / (2.0 * k * r);
    };
    auto inner = quad::integrate_finite(kern, 0.0, r, spec);
    const double c = src.decay.bound * std::exp(-src.decay.rate * r) * (r + 2.0 / (a * std::exp(1.0))) / (2.0 * k * r);
    auto outer = quad::integrate_halfline([&](double t) { return kern(r + t); }, spec, quad::DecayCertificate{0.5 * a, c});
    if (!inner.converged || !outer.converged) fail("radial resolvent integral did not converge");
    return inner.value + outer.value;
  }

  // Spherical means over a Gauss-Legendre (cos theta) x trapezoid (phi) rule.
  const auto& gl = quad::gauss_legendre(sphere_theta_nodes);
  auto mean = [&](double rho) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double mu = gl.x[i], st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
      Complex ring = 0.0;
      for (int j = 0; j < sphere_phi_nodes; ++j) {
        const double phi = 2.0 * pi * j / sphere_phi_nodes;
        Point y{x.coords[0] - rho * st * std::cos(phi), x.coords[1] - rho * st * std::sin(phi), x.coords[2] - rho * mu};
        ring += src.h(y);
      }
      s += gl.w[i] * ring * (2.0 * pi / sphere_phi_nodes);
    }
    return s;
  };
  const double c = src.decay.bound * std::exp(src.decay.rate * r) * 2.0 / (a * std::exp(1.0));
  auto res = quad::integrate_halfline([&](double rho) { return rho * std::exp(-k * rho) * inv4pi * mean(rho); }, spec,
                                      quad::DecayCertificate{0.5 * a, c});
  if (!res.converged) fail("resolvent integral did not converge");
  return res.value;
}

Complex resolvent_coefficient(const PointInteraction& p, double lambda, Complex w0) {
  if (p.n != 3) throw Unsupported("the resolvent is implemented for n = 3");
  if (!(lambda > 0.0)) throw DomainError("resolvent needs lambda > 0");
  const ExtReal alpha = alpha_from_beta(3, p.beta, Dictionary::BoundaryCondition);
  if (alpha.is_infinite()) return 0.0;
  // Gamma^alpha(lambda) = 4 pi / (sqrt(lambda) + 4 pi alpha).
  const double k = std::sqrt(lambda);
  const double denom = k + 4.0 * pi * alpha.value();
  if (std::abs(denom) <= 1e-12 * std::max(1.0, std::abs(4.0 * pi * alpha.value())))
    throw PoleError("lambda is the eigenvalue of A_beta");
  return 4.0 * pi / denom * w0;
}

Complex resolvent_coefficient_normalised(const PointInteraction& p, double lambda, Complex w0) {
  if (p.n != 3) throw Unsupported("the resolvent is implemented for n = 3");
  const ExtReal alpha = alpha_from_beta(3, p.beta, Dictionary::EightPi);
  if (alpha.is_infinite()) return 0.0;
  const double k = std::sqrt(lambda);
  const double denom = k + 4.0 * pi * alpha.value();
  if (denom == 0.0) throw PoleError("singular Krein coefficient");
  // ||R_lambda||^2 = 1 / (8 pi sqrt(lambda)).
  return 8.0 * pi * k * (4.0 * pi / denom) * w0;
}

SingularDecomposition resolvent_decomposition(const PointInteraction& p, double lambda, const Source& src,
                                              const quad::QuadratureSpec& spec) {
  const Complex w0 = free_resolvent_apply(lambda, src, Point{0.0, 0.0, 0.0}, spec);
  const Complex kappa = resolvent_coefficient(p, lambda, w0);
  const double k = std::sqrt(lambda);
  SingularDecomposition d;
  d.ctx = SpaceContext(3, 2.0);
  d.c0 = kappa;
  d.c.assign(3, 0.0);
  d.f0 = w0 + kappa * (1.0 - k) * inv4pi;
  d.f_eval = [lambda, src, spec, kappa, k](const Point& x) {
    return free_resolvent_apply(lambda, src, x, spec) + kappa * yukawa_minus_g3(k, x.norm());
  };
  return d;
}

Complex resolvent_apply(const PointInteraction& p, double lambda, const Source& src, const Point& x,
                        const quad::QuadratureSpec& spec) {
  const Complex w0 = free_resolvent_apply(lambda, src, Point{0.0, 0.0, 0.0}, spec);
  const Complex kappa = resolvent_coefficient(p, lambda, w0);
  const Complex free = free_resolvent_apply(lambda, src, x, spec);
  if (kappa == Complex(0.0)) return free;
  const double r = x.norm();
  if (r < specfun::origin_floor) throw SingularityError("resolvent output is singular at the origin");
  return free + kappa * yukawa(std::sqrt(lambda), r);
}

GreenResult green_form(const SingularDecomposition& u, const SingularDecomposition& v) {
  const int n = u.ctx.n;
  if (v.ctx.n != n) throw ContractViolation("green_form needs equal dimensions");
  if (std::abs(1.0 / u.ctx.p + 1.0 / v.ctx.p - 1.0) > 1e-12) throw ContractViolation("green_form needs conjugate exponents");
  const CaseTag tu = sobolev::classify(u.ctx).tag, tv = sobolev::classify(v.ctx).tag;

  std::string label;
  auto pick = [&](CaseTag a, CaseTag b) -> std::string {
    if (n == 1) return "a";
    if (n == 2) return a == CaseTag::FullSingular ? "b" : "c";
    if (n == 3) return a == CaseTag::FullSingular ? "d" : b == CaseTag::Regular ? "e" : "f";
    return a == CaseTag::FullSingular ? "h" : "g";
  };
  if (tu == CaseTag::Regular && tv == CaseTag::Regular) {
    label = "regular";
  } else if (tu == CaseTag::Regular || (tu == CaseTag::ScalarSingular && tv == CaseTag::FullSingular)) {
    label = pick(tv, tu) + "'";
  } else {
    label = pick(tu, tv);
  }

  auto need = [](bool ok, const char* what) {
    if (!ok) throw ContractViolation(what);
  };
  Complex e = 0.0;
  if (tu != CaseTag::Regular) {
    need(v.f0.has_value(), "green_form needs g(0)");
    e += u.c0 * std::conj(*v.f0);
  }
  if (tu == CaseTag::FullSingular) {
    need(v.grad_f0.has_value() && u.c.size() == static_cast<std::size_t>(n), "green_form needs grad g(0)");
    for (int i = 0; i < n; ++i) e -= u.c[i] * std::conj((*v.grad_f0)[i]);
  }
  if (tv != CaseTag::Regular) {
    need(u.f0.has_value(), "green_form needs f(0)");
    e -= *u.f0 * std::conj(v.c0);
  }
  if (tv == CaseTag::FullSingular) {
    need(u.grad_f0.has_value() && v.c.size() == static_cast<std::size_t>(n), "green_form needs grad f(0)");
    for (int i = 0; i < n; ++i) e += (*u.grad_f0)[i] * std::conj(v.c[i]);
  }
  return {e, label};
}

ExtComplex adjoint_parameter(const ExtComplex& beta) {
  if (beta.is_infinite()) return beta;
  return ExtComplex(std::conj(beta.value()));
}

}  // namespace puncture::operators
