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

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <type_traits>
#include <vector>

#include "puncture/common.hpp"

namespace puncture::quad {

struct QuadratureSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
  // Hard upper limit for half-line truncation points.
  double tail_cutoff = 1e4;
  // Number of geometric panels u*/2^k placed at the left end of a half-line
  // integral before adaptive refinement starts.
  int geometric_levels = 12;

  void validate() const {
    if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0) || abs_tol + rel_tol <= 0.0)
      throw ContractViolation("quadrature tolerances must be >= 0 with positive sum");
    if (max_subdivisions < 1) throw ContractViolation("max_subdivisions must be >= 1");
    if (!(tail_cutoff > 0.0)) throw ContractViolation("tail_cutoff must be > 0");
  }

  // Tolerances tight enough that finite differences of the result are
  // meaningful.
  static QuadratureSpec precise() {
    QuadratureSpec s;
    s.abs_tol = 0.0;
    s.rel_tol = 1e-14;
    s.max_subdivisions = 4000;
    return s;
  }
};

template <typename T>
struct QuadResult {
  T value{};
  double error_estimate = 0.0;
  int subdivisions_used = 0;
  bool converged = true;
};

// Exponential tail bound |f(u)| <= bound * exp(-rate * u).
struct DecayCertificate {
  double rate = 1.0;
  double bound = 1.0;
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Complex& v) { return std::abs(v); }
inline bool finite(double v) { return std::isfinite(v); }
inline bool finite(const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

template <typename T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename T, typename F>
T eval_checked(F& f, double x) {
  T v = static_cast<T>(f(x));
  if (!finite(v)) throw EvaluationError("non-finite integrand value at x = " + std::to_string(x), x);
  return v;
}

template <typename T, typename F>
Panel<T> gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<T, 15> fv;
  fv[7] = eval_checked<T>(f, c);
  for (int j = 0; j < 7; ++j) {
    fv[j] = eval_checked<T>(f, c - h * xgk[j]);
    fv[14 - j] = eval_checked<T>(f, c + h * xgk[j]);
  }
  T resk = fv[7] * wgk[7];
  T resg = fv[7] * wg[3];
  double resabs = magnitude(fv[7]) * wgk[7];
  for (int j = 0; j < 7; ++j) {
    T pair = fv[j] + fv[14 - j];
    resk += pair * wgk[j];
    resabs += (magnitude(fv[j]) + magnitude(fv[14 - j])) * wgk[j];
    if (j % 2 == 1) resg += pair * wg[j / 2];
  }
  const T mean = resk * 0.5;
  double resasc = magnitude(fv[7] - mean) * wgk[7];
  for (int j = 0; j < 7; ++j)
    resasc += (magnitude(fv[j] - mean) + magnitude(fv[14 - j] - mean)) * wgk[j];

  resk *= h;
  resasc *= std::abs(h);
  resabs *= std::abs(h);
  double err = magnitude((resk - resg * h));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  err = std::max(err, 10.0 * eps * resabs);
  return {a, b, resk, err};
}

template <typename T, typename F>
QuadResult<T> adaptive(F& f, const std::vector<double>& breaks, const QuadratureSpec& spec) {
  std::priority_queue<Panel<T>> heap;
  T total{};
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    Panel<T> p = gk15<T>(f, breaks[i], breaks[i + 1]);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  QuadResult<T> out;
  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * magnitude(total)); };
  int used = 0;
  while (total_err > tolerance()) {
    if (used >= spec.max_subdivisions || heap.empty()) {
      out.converged = false;
      break;
    }
    Panel<T> worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      out.converged = false;
      break;
    }
    heap.pop();
    Panel<T> left = gk15<T>(f, worst.a, mid);
    Panel<T> right = gk15<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++used;
    if (total_err <= tolerance()) {
      // Re-sum to shed accumulated cancellation before the final test.
      T s{};
      double e = 0.0;
      auto copy = heap;
      while (!copy.empty()) {
        s += copy.top().value;
        e += copy.top().error;
        copy.pop();
      }
      total = s;
      total_err = e;
    }
  }
  out.value = total;
  out.error_estimate = total_err;
  out.subdivisions_used = used;
  return out;
}

template <typename F>
using value_t = std::conditional_t<std::is_convertible_v<std::invoke_result_t<F&, double>, double>,
                                   double, Complex>;

}  // namespace detail

// Integral of f over [a,b] with optional interior breakpoints.
template <typename F>
QuadResult<detail::value_t<F>> integrate_finite(F&& f, double a, double b, const QuadratureSpec& spec = {},
                                                std::vector<double> breaks = {}) {
  spec.validate();
  if (!(a < b)) throw ContractViolation("integrate_finite requires a < b");
  breaks.push_back(a);
  breaks.push_back(b);
  std::erase_if(breaks, [&](double x) { return x < a || x > b; });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return detail::adaptive<detail::value_t<F>>(f, breaks, spec);
}

// Truncation point u* with bound * exp(-rate u*) / rate = tol / 10.
inline double tail_truncation(const DecayCertificate& cert, double tol) {
  if (!(cert.rate > 0.0)) throw ContractViolation("decay rate must be > 0");
  if (!(cert.bound > 0.0)) throw ContractViolation("decay bound must be > 0");
  const double u = std::log(10.0 * cert.bound / (cert.rate * tol)) / cert.rate;
  return std::max(u, 1.0 / cert.rate);
}

inline std::vector<double> geometric_breaks(double upper, int levels) {
  std::vector<double> b;
  double x = upper;
  for (int k = 0; k < levels; ++k) {
    x *= 0.5;
    b.push_back(x);
  }
  return b;
}

// Integral over [0, inf) for integrands with a certified exponential tail.
template <typename F>
QuadResult<detail::value_t<F>> integrate_halfline(F&& f, const QuadratureSpec& spec, DecayCertificate cert) {
  spec.validate();
  const double tol = spec.abs_tol > 0.0 ? spec.abs_tol : 1e-20 * cert.bound;
  double upper = tail_truncation(cert, tol);
  bool capped = false;
  if (upper > spec.tail_cutoff) {
    upper = spec.tail_cutoff;
    capped = true;
  }
  auto r = integrate_finite(f, 0.0, upper, spec, geometric_breaks(upper, spec.geometric_levels));
  if (capped) {
    r.error_estimate += cert.bound * std::exp(-cert.rate * upper) / cert.rate;
    r.converged = false;
  }
  return r;
}

template <typename F>
QuadResult<detail::value_t<F>> integrate_halfline(F&& f, const QuadratureSpec& spec, double decay_rate) {
  return integrate_halfline(std::forward<F>(f), spec, DecayCertificate{decay_rate, 1.0});
}

// Integral over R^n of g(|y|), with the certificate applying to g(r) r^{n-1}.
template <typename G>
QuadResult<detail::value_t<G>> integrate_radial(G&& g, int n, const QuadratureSpec& spec,
                                                DecayCertificate cert = {}) {
  if (n < 1) throw ContractViolation("dimension must be >= 1");
  auto integrand = [&](double r) { return g(r) * std::pow(r, n - 1); };
  auto r = integrate_halfline(integrand, spec, cert);
  const double w = sphere_area(n);
  r.value *= w;
  r.error_estimate *= w;
  return r;
}

// Integral over the ball |y| <= radius of g(|y|).
template <typename G>
QuadResult<detail::value_t<G>> integrate_radial_ball(G&& g, int n, double radius, const QuadratureSpec& spec) {
  if (n < 1) throw ContractViolation("dimension must be >= 1");
  auto integrand = [&](double r) { return g(r) * std::pow(r, n - 1); };
  auto r = integrate_finite(integrand, 0.0, radius, spec, geometric_breaks(radius, spec.geometric_levels));
  const double w = sphere_area(n);
  r.value *= w;
  r.error_estimate *= w;
  return r;
}

// Gauss-Legendre nodes and weights on [-1,1].
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int m);

}  // namespace puncture::quad
