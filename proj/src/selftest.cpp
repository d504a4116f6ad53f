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

#include "puncture/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include "puncture/heatkernel.hpp"
#include "puncture/operators.hpp"
#include "puncture/sobolev.hpp"
#include "puncture/spde.hpp"
#include "puncture/specfun.hpp"

namespace puncture::selftest {

namespace {

using operators::Dictionary;
using operators::PointInteraction;
using sobolev::SpaceContext;

struct Outcome {
  bool pass = true;
  bool known_defect = false;
  std::string detail;
};

// Collects failed conditions and the largest errors seen.
class Tracker {
 public:
  void require(bool cond, const std::string& what) {
    if (cond) return;
    ok_ = false;
    if (failures_.size() < 3) failures_.push_back(what);
  }
  void metric(const std::string& name, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s %.3g", name.c_str(), v);
    metrics_.push_back(buf);
  }
  bool ok() const { return ok_; }
  Outcome outcome() const {
    Outcome o;
    o.pass = ok_;
    for (std::size_t i = 0; i < metrics_.size(); ++i) o.detail += (i ? "; " : "") + metrics_[i];
    for (const auto& f : failures_) o.detail += (o.detail.empty() ? "failed: " : "; failed: ") + f;
    return o;
  }

 private:
  bool ok_ = true;
  std::vector<std::string> failures_, metrics_;
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// b(s) = exp(-1/(1 - s^2)) on |s| < 1 and its first two derivatives.
double bump(double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }
double bump_d1(double s) {
  const double b = bump(s);
  if (b == 0.0) return 0.0;
  const double q = 1.0 - s * s;
  return b * (-2.0 * s / (q * q));
}
double bump_d2(double s) {
  const double b = bump(s);
  if (b == 0.0) return 0.0;
  const double q = 1.0 - s * s;
  return b * (4.0 * s * s / (q * q * q * q) - 2.0 / (q * q) - 8.0 * s * s / (q * q * q));
}

Point diagonal(int n, double r) {
  Point x = Point::radial(n, 0.0);
  for (auto& c : x.coords) c = r / std::sqrt(static_cast<double>(n));
  return x;
}

// ---------------------------------------------------------------------------

Outcome closed_form_kernels() {
  Tracker t;
  double worst = 0.0;
  const double g1 = specfun::bessel_potential(1, 0.0).value;
  t.require(g1 == 0.5, "G_1(0) = 1/2");
  const double g3 = specfun::bessel_potential(3, 1.0).value;
  worst = std::max(worst, rel(g3, 1.0 / (4.0 * pi * std::exp(1.0))));
  // Quadrature routes against the closed forms.
  worst = std::max(worst, rel(specfun::bessel_potential_t_integral(1, 0.0).value, 0.5));
  worst = std::max(worst, rel(specfun::bessel_potential_t_integral(3, 1.0).value, 1.0 / (4.0 * pi * std::exp(1.0))));
  for (double z : {0.5, 1.0, 2.0, 5.0}) {
    const double closed = std::sqrt(pi / (2.0 * z)) * std::exp(-z);
    for (double nu : {0.5, -0.5}) {
      t.require(rel(specfun::macdonald_k(nu, z).value, closed) <= 1e-15, "K_{" + num(nu) + "}(" + num(z) + ") closed form");
      worst = std::max(worst, rel(specfun::macdonald_k_integral(nu, z).value, closed));
    }
  }
  t.require(worst <= 1e-9, "quadrature vs closed form <= 1e-9");
  t.metric("max rel err", worst);
  return t.outcome();
}

Outcome l2_norms() {
  Tracker t;
  quad::QuadratureSpec s;
  s.abs_tol = 0.0;
  s.rel_tol = 1e-12;
  const double n2 = quad::integrate_radial([](double r) { return std::pow(specfun::bessel_potential(2, r).value, 2); }, 2, s,
                                           quad::DecayCertificate{1.5, 1.0})
                        .value;
  const double n3 = quad::integrate_radial([](double r) { return std::pow(specfun::bessel_potential(3, r).value, 2); }, 3, s,
                                           quad::DecayCertificate{2.0, 1.0})
                        .value;
  const double e3 = rel(n3, 1.0 / (8.0 * pi));
  const double e2_claim = rel(n2, 0.5);
  const double e2_plancherel = rel(n2, 1.0 / (4.0 * pi));
  t.require(e3 <= 1e-8, "||G_3||^2 = 1/(8 pi)");
  t.require(e2_claim <= 1e-8, "||G_2||^2 = 1/2");
  Outcome o = t.outcome();
  o.detail = "||G_3||^2 rel err " + num(e3) + "; ||G_2||^2 = " + num(n2) + " vs claimed 1/2 (rel err " + num(e2_claim) +
             "), vs 1/(4 pi) rel err " + num(e2_plancherel);
  // The only failing sub-check is the documented false claim, and the value matches Plancherel.
  o.known_defect = !o.pass && e3 <= 1e-8 && e2_plancherel <= 1e-8;
  return o;
}

Outcome weak_identity() {
  Tracker t;
  double worst = 0.0;
  for (int n : {2, 3}) {
    for (double R : {0.5, 1.0, 2.0}) {
      // phi(x) = b(|x|/R); (1 - Delta) phi = phi - phi'' - (n-1) phi' / r.
      auto f = [n, R](double r) {
        if (r == 0.0) return 0.0;
        const double s = r / R;
        const double lap = bump_d2(s) / (R * R) + (n - 1) * bump_d1(s) / (R * r);
        return std::pow(r, n - 1) * specfun::bessel_potential(n, r).value * (bump(s) - lap);
      };
      auto q = quad::integrate_finite(f, 0.0, R, {}, quad::geometric_breaks(R, 20));
      const double err = std::abs(sphere_area(n) * q.value - bump(0.0));
      worst = std::max(worst, err);
      t.require(err <= 1e-6, "n=" + std::to_string(n) + " R=" + num(R));
    }
  }
  t.metric("max abs err", worst);
  return t.outcome();
}

Outcome one_d_decomposition() {
  Tracker t;
  for (double beta : {0.5, 1.0, 2.0}) {
    auto d = sobolev::decompose_1d({0.5, 0.5, -beta / 2.0, beta / 2.0});
    t.require(d.c0 == Complex(beta) && d.c[0] == Complex(0.0) && *d.f0 == Complex((1.0 - beta) / 2.0),
              "example beta=" + num(beta));
  }
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    sobolev::OneDBoundaryData b{{nd(rng), nd(rng)}, {nd(rng), nd(rng)}, {nd(rng), nd(rng)}, {nd(rng), nd(rng)}};
    auto back = sobolev::recompose_1d(sobolev::decompose_1d(b));
    worst = std::max({worst, std::abs(back.u_plus - b.u_plus), std::abs(back.u_minus - b.u_minus),
                      std::abs(back.du_plus - b.du_plus), std::abs(back.du_minus - b.du_minus)});
  }
  t.require(worst <= 1e-12, "round trip <= 1e-12");
  t.metric("round-trip max err", worst);
  return t.outcome();
}

Outcome scaling_constants() {
  Tracker t;
  const auto precise = quad::QuadratureSpec::precise();
  double worst = 0.0;
  std::string n2_report;
  for (double lambda : {0.25, 4.0}) {
    sobolev::Evaluable u2 = [&](const Point& x) {
      return Complex(specfun::bessel_potential_scaled(2, lambda, x.norm(), precise).value);
    };
    auto c2 = sobolev::extract_c0_by_limit(u2, {2, 2.0});
    worst = std::max(worst, std::abs(c2.value - 1.0));
    sobolev::Evaluable u3 = [&](const Point& x) {
      return Complex(specfun::bessel_potential_scaled(3, lambda, x.norm(), precise).value);
    };
    auto c3 = sobolev::extract_c0_by_limit(u3, {3, 2.0});
    auto f3 = sobolev::extract_f0(u3, c3.value, {3, 2.0});
    worst = std::max(worst, std::abs(c3.value - 1.0 / std::sqrt(lambda)));
    worst = std::max(worst, std::abs(f3.value - (1.0 / std::sqrt(lambda) - 1.0) / (4.0 * pi)));

    // n = 2: the measured constant term against the K_0-frame log shift.
    const double f2 = sobolev::extract_f0(u2, c2.value, {2, 2.0}).value.real();
    const double shift = sobolev::scaling_shift(2, lambda).f0_shift_per_unit_c0;
    n2_report += " lambda=" + num(lambda) + ": f0(G_2,lambda)=" + num(f2) + ", K_0-frame shift " + num(shift) +
                 ", ratio " + num(-shift / f2);
  }
  t.require(worst <= 1e-6, "coefficients <= 1e-6");
  Outcome o = t.outcome();
  o.detail = "max err " + num(worst) + "; n=2 normalisation (ratio 2 pi expected):" + n2_report;
  return o;
}

Outcome eigen_suite() {
  Tracker t;
  struct Case {
    int n;
    double beta;
  };
  double worst_res = 0.0, worst_tau = 0.0;
  for (Case c : {Case{2, -1.0}, Case{2, 1.0}, Case{2, 2.0}, Case{3, -5.0}, Case{3, 20.0 * pi}}) {
    PointInteraction op(c.n, c.beta);
    auto e = operators::eigenvalue(op);
    if (!e) {
      t.require(false, "eigenvalue exists for beta=" + num(c.beta));
      continue;
    }
    auto a = operators::apply_A_beta(e->decomposition, op);
    for (double r : {0.3, 1.0, 3.0}) {
      const Point x = diagonal(c.n, r);
      const Complex ex = e->e(x);
      worst_res = std::max(worst_res, std::abs(a(x) + e->lambda * ex) / std::abs(ex));
    }
    worst_tau = std::max(worst_tau, std::abs(operators::boundary_functional(e->decomposition, op)));
  }
  t.require(worst_res <= 1e-5, "PDE residual <= 1e-5");
  t.require(worst_tau <= 1e-8, "|tau e| <= 1e-8");
  t.metric("max residual", worst_res);
  t.metric("max |tau e|", worst_tau);
  return t.outcome();
}

Outcome dictionary_round_trip() {
  Tracker t;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  double worst = 0.0;
  for (int n : {2, 3}) {
    for (auto dict : {Dictionary::EightPi, Dictionary::BoundaryCondition}) {
      for (int k = 0; k < 50; ++k) {
        const double b = u(rng), a = u(rng);
        const ExtReal b2 = operators::beta_from_alpha(n, operators::alpha_from_beta(n, b, dict), dict);
        const ExtReal a2 = operators::alpha_from_beta(n, operators::beta_from_alpha(n, a, dict), dict);
        t.require(b2.is_finite() && a2.is_finite(), "finite values stay finite");
        if (b2.is_finite()) worst = std::max(worst, std::abs(b2.value() - b) / std::max(1.0, std::abs(b)));
        if (a2.is_finite()) worst = std::max(worst, std::abs(a2.value() - a) / std::max(1.0, std::abs(a)));
      }
      t.require(operators::alpha_from_beta(n, 0.0, dict).is_infinite(), "beta=0 -> alpha=inf");
      t.require(operators::beta_from_alpha(n, ExtReal::infinity(), dict) == ExtReal(0.0), "alpha=inf -> beta=0");
    }
  }
  // beta = infinity <-> alpha = -1/(4 pi) (n = 3) and alpha = 0 (n = 2).
  t.require(std::abs(operators::alpha_from_beta(3, ExtReal::infinity()).value() + 1.0 / (4.0 * pi)) <= 1e-16,
            "beta=inf -> alpha=-1/(4 pi)");
  t.require(operators::beta_from_alpha(3, -1.0 / (4.0 * pi)).is_infinite(), "alpha=-1/(4 pi) -> beta=inf");
  t.require(operators::alpha_from_beta(2, ExtReal::infinity()).value() == 0.0, "n=2 beta=inf -> alpha=0");
  t.require(operators::beta_from_alpha(2, 0.0).is_infinite(), "n=2 alpha=0 -> beta=inf");
  t.require(worst <= 1e-12, "round trip <= 1e-12");
  t.metric("max rel err", worst);
  return t.outcome();
}

Outcome heat_kernel_suite() {
  Tracker t;
  const double T = 2.0;
  double worst_limit = 0.0, worst_sym = 0.0;
  for (double beta : {8.0 * pi, 20.0 * pi}) {
    const PointInteraction op(3, beta);
    const double alpha = operators::alpha_from_beta(3, beta).value();
    const double c = heatkernel::c_lower_bound(alpha, T);
    t.require(c > 0.0, "c(alpha, T) > 0");
    for (double tt : {0.05, 0.5, 1.0, 1.5, 2.0}) {
      for (double ry : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        const Point y{0.0, ry, 0.0}, x{0.3 * ry, 0.2, -0.4};
        const double g = heatkernel::heat_kernel_beta({tt, x, y, op}).value;
        const double gt = heatkernel::heat_kernel_beta({tt, y, x, op}).value;
        const double p = heatkernel::gaussian(tt, (x - y).norm());
        worst_sym = std::max(worst_sym, std::abs(g - gt) / g);
        t.require(g >= p && p >= 0.0, "G >= P >= 0");
        t.require(heatkernel::heat_kernel_beta({tt, x, y, {3, 0.0}}).value == p, "beta = 0 collapse");
        const double r = heatkernel::r_beta(tt, y, op).value;
        const double top = 8.0 * pi * tt / ry * heatkernel::gaussian(tt, ry);
        t.require(r <= top && r >= c * top, "sandwich");
        auto lim = heatkernel::r_beta_limit(tt, y, op);
        worst_limit = std::max(worst_limit, std::abs(lim.value - r) / r);
      }
    }
  }
  t.require(worst_sym <= 1e-14, "symmetry");
  t.require(worst_limit <= 1e-5, "limit diagnostic <= 1e-5");
  t.metric("max limit rel err", worst_limit);
  t.metric("max asymmetry", worst_sym);
  return t.outcome();
}

Outcome semigroup_property() {
  Tracker t;
  const PointInteraction op(3, 8.0 * pi);
  operators::Source v;
  v.radial = true;
  v.h = [](const Point& y) { return Complex(std::exp(-y.norm() * y.norm())); };
  v.decay = {1.0, std::exp(0.25)};
  const double s = 0.4, tt = 0.3;
  operators::Source inner;
  inner.radial = true;
  inner.h = [&](const Point& y) {
    if (y.norm() < specfun::origin_floor) return Complex(0.0);
    return Complex(heatkernel::semigroup_apply(op, s, v, y));
  };
  inner.decay = {0.5, 5.0};
  double worst = 0.0;
  for (double r : {0.2, 0.8, 1.6}) {
    const Point p{r, 0.0, 0.0};
    const double lhs = heatkernel::semigroup_apply(op, tt, inner, p);
    const double rhs = heatkernel::semigroup_apply(op, tt + s, v, p);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  t.require(worst <= 1e-4, "S(t)S(s) = S(t+s) <= 1e-4");
  t.metric("max rel err", worst);
  return t.outcome();
}

Outcome spde_suite() {
  Tracker t;
  spde::SimulationConfig cfg;
  cfg.op = PointInteraction(3, ExtReal(8.0 * pi));
  cfg.T = 1.0;
  cfg.dt = 5e-3;
  cfg.points = {Point{1.0, 0.0, 0.0}};
  cfg.n_paths = 10000;
  cfg.seed = 20261017;
  auto e = spde::simulate(cfg);
  const std::size_t k = e.times.size() - 1;
  std::vector<double> col(e.n_paths);
  for (std::size_t p = 0; p < e.n_paths; ++p) col[p] = e.sample(p, k, 0);
  auto m = spde::sample_moments(col);
  const double oracle = spde::variance_oracle(cfg.op, 1.0, cfg.points[0]);
  const double z = (m.variance - oracle) / m.variance_stderr();
  t.require(std::abs(z) <= 3.0, "variance within 3 standard errors");
  t.require(std::abs(m.skewness) <= 4.0 * m.skewness_stderr(), "skewness within 4 standard errors");
  t.require(std::abs(m.excess_kurtosis) <= 4.0 * m.kurtosis_stderr(), "kurtosis within 4 standard errors");
  t.require(std::abs(m.mean) <= 3.0 * m.mean_stderr(), "mean within 3 standard errors");
  cfg.threads = 1;
  auto again = spde::simulate(cfg);
  t.require(again.samples == e.samples && again.variance == e.variance, "bit-identical rerun");
  t.metric("variance z", z);
  t.metric("skew/se", m.skewness / m.skewness_stderr());
  t.metric("kurt/se", m.excess_kurtosis / m.kurtosis_stderr());
  return t.outcome();
}

Outcome wellposedness_suite() {
  Tracker t;
  for (int n : {2, 3}) {
    const double p0 = n / (n - 1.0);
    for (int i = 0; i < 20; ++i) {
      const double p = 1.05 + i * (p0 + 0.5 - 1.05) / 19.0;
      auto rep = spde::wellposed_beta0({n, p});
      t.require(rep.finite == (p < p0) && rep.finite == !rep.estimate.diverged, "I(t,p) n=" + std::to_string(n) + " p=" + num(p));
    }
  }
  for (int i = 0; i < 20; ++i) {
    const double p = 1.1 + i * (3.5 - 1.1) / 19.0;
    auto rep = spde::wellposed_beta_nonzero(p);
    t.require(rep.finite == (p > 1.5 && p < 3.0), "J(p) verdict p=" + num(p));
    if (p > 1.5) t.require(rep.finite == !rep.estimate.diverged, "J(p) numerics p=" + num(p));
  }
  for (int i = 0; i < 20; ++i) {
    const double l = 0.1 + 0.15 * i;
    t.require(spde::hl_wellposed_beta_nonzero(l) == (l > 1.0), "H^{-l} verdict l=" + num(l));
    t.require(spde::hl_wellposed_beta_nonzero(l) == !spde::hl_time_integral(l).diverged, "H^{-l} numerics l=" + num(l));
  }
  for (int n : {2, 3}) {
    for (int i = 0; i < 10; ++i) {
      const double l = 0.5 * n + 0.05 + 0.3 * i;
      auto rep = spde::invariant_measure_exists(n, l);
      t.require(rep.exists == (n == 3) && rep.exists == !rep.diagnostic.diverged, "invariant measure n=" + std::to_string(n));
    }
  }
  const double growth = spde::wellposed_beta_nonzero(2.99).estimate.value / spde::wellposed_beta_nonzero(2.9).estimate.value;
  t.require(growth > 10.0, "J(p) blow-up > 10x");
  t.metric("J(2.99)/J(2.9)", growth);
  return t.outcome();
}

Outcome classification_suite() {
  Tracker t;
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> dn(1, 8), dm(1, 4), dl(0, 2);
  std::uniform_real_distribution<double> dp(1.0001, 12.0);
  int mismatches = 0;
  for (int k = 0; k < 10000; ++k) {
    const SpaceContext ctx(dn(rng), dp(rng));
    const int m = dm(rng), l = dl(rng);
    const double n = ctx.n, p = ctx.p;
    // Thresholds written directly from the inequalities.
    const bool full = p * (n - 1.0) < n;
    const bool regular = p * (n - 2.0) >= n;
    const auto c = sobolev::classify(ctx);
    const auto expect = full ? sobolev::CaseTag::FullSingular : regular ? sobolev::CaseTag::Regular : sobolev::CaseTag::ScalarSingular;
    bool ok = c.tag == expect && c.singular_dim == (full ? ctx.n + 1 : regular ? 0 : 1);
    const auto z = sobolev::zero_trace_case(ctx);
    ok = ok && z == (p <= n / 2.0 ? sobolev::ZeroTrace::NoConstraint
                     : p <= n     ? sobolev::ZeroTrace::ValueZero
                                  : sobolev::ZeroTrace::ValueAndGradZero);
    ok = ok && sobolev::singleton_polar(m, ctx) == (m - n / p <= 0.0);
    ok = ok && sobolev::friedrichs_unique(ctx) == (ctx.n >= 3 && p <= n / 2.0);
    // D^l delta lies in W^{-2,p} iff W^{2,p'} embeds into C^l: 2 - n/p' > l.
    ok = ok && sobolev::dirac_derivative_in_negative_sobolev(l, ctx) == (2.0 - n * (1.0 - 1.0 / p) > l);
    if (!ok) ++mismatches;
  }
  t.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  t.metric("samples", 10000);
  t.metric("mismatches", mismatches);
  return t.outcome();
}

Outcome green_form_suite() {
  Tracker t;
  std::mt19937_64 rng(13);
  std::normal_distribution<double> nd;
  auto cx = [&] { return Complex(nd(rng), nd(rng)); };
  auto decomp = [&](int n, double p, bool singular) {
    sobolev::SingularDecomposition d;
    d.ctx = SpaceContext(n, p);
    d.c.assign(static_cast<std::size_t>(n), 0.0);
    const auto tag = sobolev::classify(d.ctx).tag;
    if (singular && tag != sobolev::CaseTag::Regular) d.c0 = cx();
    if (singular && tag == sobolev::CaseTag::FullSingular)
      for (auto& c : d.c) c = cx();
    d.f0 = cx();
    d.grad_f0 = std::vector<Complex>(static_cast<std::size_t>(n));
    for (auto& g : *d.grad_f0) g = cx();
    return d;
  };
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    // E(G_n, G_n) = 0 and E(f, g) = 0.
    for (int n : {2, 3}) {
      sobolev::SingularDecomposition g;
      g.ctx = SpaceContext(n, 2.0);
      g.c.assign(static_cast<std::size_t>(n), 0.0);
      g.c0 = 1.0;
      g.f0 = 0.0;
      worst = std::max(worst, std::abs(operators::green_form(g, g).value));
      auto f = decomp(n, 2.0, false), h = decomp(n, 2.0, false);
      worst = std::max(worst, std::abs(operators::green_form(f, h).value));
    }
    // E(D_i G_1, G_1) = 0 in the full-singular case n = 1.
    sobolev::SingularDecomposition d1, g1;
    d1.ctx = g1.ctx = SpaceContext(1, 2.0);
    d1.c = {1.0};
    d1.f0 = 0.0;
    d1.grad_f0 = std::vector<Complex>{0.0};
    g1.c = {0.0};
    g1.c0 = 1.0;
    g1.f0 = 0.0;
    g1.grad_f0 = std::vector<Complex>{0.0};
    worst = std::max(worst, std::abs(operators::green_form(d1, g1).value));

    // Case (c): E(u, v) = c0 conj(g(0)) - f(0) conj(d0).
    auto u = decomp(2, 2.0, true), v = decomp(2, 2.0, true);
    auto e = operators::green_form(u, v);
    t.require(e.case_label == "c", "case label c");
    worst = std::max(worst, std::abs(e.value - (u.c0 * std::conj(*v.f0) - *u.f0 * std::conj(v.c0))));
    worst = std::max(worst, std::abs(e.value + std::conj(operators::green_form(v, u).value)));
    auto u3 = decomp(3, 1.5, true), v3 = decomp(3, 3.0, true);
    worst = std::max(worst, std::abs(operators::green_form(u3, v3).value + std::conj(operators::green_form(v3, u3).value)));

    // D(A_beta)-orthogonality for real beta.
    const double beta = 5.0 * nd(rng);
    for (int n : {2, 3}) {
      PointInteraction op(n, beta);
      const double scale = n == 2 ? 2.0 * pi * beta : beta;
      auto a = decomp(n, 2.0, false), b = decomp(n, 2.0, false);
      a.c0 = scale * *a.f0;
      b.c0 = scale * *b.f0;
      t.require(operators::domain_membership(a, op) && operators::domain_membership(b, op), "domain members");
      worst = std::max(worst, std::abs(operators::green_form(a, b).value));
    }
  }
  t.require(worst <= 1e-10, "identities <= 1e-10");
  t.metric("max err", worst);
  return t.outcome();
}

struct Criterion {
  const char* id;
  double budget;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"closed-form-kernels", 1.0, closed_form_kernels},
      {"l2-norms", 1.0, l2_norms},
      {"weak-identity", 5.0, weak_identity},
      {"one-d-decomposition", 1.0, one_d_decomposition},
      {"scaling-constants", 5.0, scaling_constants},
      {"eigen-suite", 10.0, eigen_suite},
      {"dictionary", 1.0, dictionary_round_trip},
      {"heat-kernel", 60.0, heat_kernel_suite},
      {"semigroup", 60.0, semigroup_property},
      {"spde", 120.0, spde_suite},
      {"wellposedness", 30.0, wellposedness_suite},
      {"classification", 1.0, classification_suite},
      {"green-form", 1.0, green_form_suite},
  };
  return all;
}

}  // namespace

std::vector<std::string> criterion_ids() {
  std::vector<std::string> ids;
  for (const auto& c : criteria()) ids.emplace_back(c.id);
  return ids;
}

Summary run(std::ostream& out, const std::string& only) {
  Summary s;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::string(c.id).find(only) == std::string::npos) continue;
    CriterionResult r;
    r.id = c.id;
    r.budget_seconds = c.budget;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.detail = o.detail;
    r.known_defect = o.known_defect;
    r.pass = o.pass;
    if (r.pass && r.seconds > r.budget_seconds) {
      r.pass = false;
      r.known_defect = false;
      r.detail += "; over time budget";
    }
    char timing[64];
    std::snprintf(timing, sizeof timing, "(%.2f s, budget %g s)", r.seconds, r.budget_seconds);
    out << (r.pass ? "PASS " : "FAIL ") << r.id << (r.known_defect ? " [known defect]" : "") << ": " << r.detail << ' '
        << timing << std::endl;
    if (r.pass)
      ++s.passed;
    else if (r.known_defect)
      ++s.known_defects;
    else
      ++s.failed;
    s.results.push_back(std::move(r));
  }
  out << "summary: " << s.passed << " passed, " << s.failed << " failed, " << s.known_defects << " known defects"
      << std::endl;
  return s;
}

}  // namespace puncture::selftest
