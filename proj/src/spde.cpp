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

#include "puncture/spde.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "puncture/heatkernel.hpp"
#include "puncture/specfun.hpp"

namespace puncture::spde {

using operators::PointInteraction;

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint64_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
  constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = m0 * ctr[0];
    const std::uint64_t p1 = m1 * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += w0;
    key[1] += w1;
  }
  return ctr;
}

namespace {

// 53-bit uniform in (0, 1).
double open_uniform(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

double standard_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step) {
  const PhiloxCounter ctr{static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                          static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
  const PhiloxKey key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const auto w = philox4x32(ctr, key);
  const double u1 = open_uniform(w[0], w[1]);
  const double u2 = open_uniform(w[2], w[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
}

// ---------------------------------------------------------------------------
// Simulation

std::size_t SimulationConfig::steps() const {
  const double k = std::round(T / dt);
  if (k < 1.0 || std::abs(k * dt - T) > 1e-9 * T)
    throw DomainError("T must be a positive integer multiple of dt");
  return static_cast<std::size_t>(k);
}

void SimulationConfig::validate() const {
  if (!(T > 0.0) || !(dt > 0.0) || !(dt < T)) throw DomainError("need 0 < dt < T");
  steps();
  if (n_paths == 0) throw DomainError("n_paths must be positive");
  if (points.empty()) throw DomainError("at least one probe point is required");
  for (const auto& y : points) {
    if (y.dim() != op.n) throw DomainError("probe dimension must equal n");
    if (y.norm() < specfun::origin_floor) throw SingularityError("probes must be nonzero");
  }
  if (op.beta.is_infinite()) throw Unsupported("beta = infinity removes the noise term");
  if (op.beta.value() != 0.0 && op.n != 3) throw Unsupported("beta != 0 is implemented for n = 3");
  spec.validate();
}

std::vector<double> convolution_weights(const PointInteraction& op, double dt, std::size_t steps, const Point& y,
                                        const quad::QuadratureSpec& spec, operators::Dictionary dict) {
  std::vector<double> w(steps + 1, 0.0);
  const double beta = op.beta.value();
  for (std::size_t m = 1; m <= steps; ++m) {
    const double tau = static_cast<double>(m) * dt;
    w[m] = beta == 0.0 ? specfun::heat_kernel_free(op.n, tau, y)
                       : heatkernel::r_beta(tau, y, op, spec, dict).value / beta;
  }
  return w;
}

double scheme_variance(const std::vector<double>& w, double dt, std::size_t k) {
  double s = 0.0;
  for (std::size_t m = 1; m <= k; ++m) s += w[m] * w[m];
  return dt * s;
}

namespace {

constexpr std::size_t chunk_paths = 64;

// Per-chunk running mean and sum of squared deviations.
struct Accumulator {
  std::size_t count = 0;
  std::vector<double> mean, m2;
};

void merge(Accumulator& into, const Accumulator& other) {
  if (other.count == 0) return;
  if (into.count == 0) {
    into = other;
    return;
  }
  const double na = static_cast<double>(into.count), nb = static_cast<double>(other.count), n = na + nb;
  for (std::size_t i = 0; i < into.mean.size(); ++i) {
    const double d = other.mean[i] - into.mean[i];
    into.mean[i] += d * nb / n;
    into.m2[i] += other.m2[i] + d * d * na * nb / n;
  }
  into.count += other.count;
}

}  // namespace

PathEnsemble simulate(const SimulationConfig& cfg) {
  cfg.validate();
  const std::size_t K = cfg.steps();
  const std::size_t P = cfg.points.size();
  const std::size_t nt = K + 1;

  PathEnsemble out;
  out.probes = cfg.points;
  out.n_paths = cfg.n_paths;
  out.times.resize(nt);
  for (std::size_t k = 0; k < nt; ++k) out.times[k] = static_cast<double>(k) * cfg.dt;

  const bool beta0 = cfg.op.beta.value() == 0.0;
  std::vector<std::vector<double>> w(P);
  for (std::size_t i = 0; i < P; ++i) {
    w[i] = convolution_weights(cfg.op, cfg.dt, K, cfg.points[i], cfg.spec, cfg.dict);
    const double r2 = cfg.points[i].coords.empty() ? 0.0 : cfg.points[i].norm() * cfg.points[i].norm();
    // P(s, y)^2 peaks at s = |y|^2 / 2n; below two steps the Riemann sum misses it.
    if (beta0 && r2 < 4.0 * cfg.op.n * cfg.dt)
      out.warnings.push_back("probe " + std::to_string(i) + " is within the time-step scale of the origin; variance integrand is steep");
  }

  // Deterministic part S(t_k) u0.
  std::vector<double> base(nt * P, 0.0);
  if (cfg.u0) {
    for (std::size_t k = 0; k < nt; ++k)
      for (std::size_t i = 0; i < P; ++i)
        base[k * P + i] = k == 0 ? cfg.u0->h(cfg.points[i]).real()
                                 : heatkernel::semigroup_apply(cfg.op, out.times[k], *cfg.u0, cfg.points[i], cfg.spec, cfg.dict);
  }

  if (cfg.store_samples) out.samples.assign(cfg.n_paths * nt * P, 0.0);
  const std::size_t n_chunks = (cfg.n_paths + chunk_paths - 1) / chunk_paths;
  std::vector<Accumulator> acc(n_chunks);
  const double sqdt = std::sqrt(cfg.dt);

  auto run_chunk = [&](std::size_t c) {
    Accumulator& a = acc[c];
    a.mean.assign(nt * P, 0.0);
    a.m2.assign(nt * P, 0.0);
    std::vector<double> dW(K), u(nt * P);
    const std::size_t first = c * chunk_paths, last = std::min(cfg.n_paths, first + chunk_paths);
    for (std::size_t path = first; path < last; ++path) {
      for (std::size_t j = 0; j < K; ++j) dW[j] = sqdt * standard_normal(cfg.seed, path, j);
      for (std::size_t k = 0; k < nt; ++k)
        for (std::size_t i = 0; i < P; ++i) {
          const double* wi = w[i].data();
          double s = 0.0;
          for (std::size_t j = 0; j < k; ++j) s += wi[k - j] * dW[j];
          u[k * P + i] = base[k * P + i] + s;
        }
      if (cfg.store_samples) std::copy(u.begin(), u.end(), out.samples.begin() + static_cast<std::ptrdiff_t>(path * nt * P));
      ++a.count;
      const double n = static_cast<double>(a.count);
      for (std::size_t q = 0; q < nt * P; ++q) {
        const double d = u[q] - a.mean[q];
        a.mean[q] += d / n;
        a.m2[q] += d * (u[q] - a.mean[q]);
      }
    }
  };

  unsigned n_threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, n_chunks));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < n_chunks; c = next++) run_chunk(c);
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  Accumulator total;
  for (const auto& a : acc) merge(total, a);
  out.mean = total.mean;
  out.variance.resize(total.m2.size());
  const double denom = total.count > 1 ? static_cast<double>(total.count - 1) : 1.0;
  for (std::size_t q = 0; q < total.m2.size(); ++q) out.variance[q] = std::max(0.0, total.m2[q] / denom);
  return out;
}

// ---------------------------------------------------------------------------
// Oracles

double variance_oracle(const PointInteraction& op, double t, const Point& y, const quad::QuadratureSpec& spec,
                       operators::Dictionary dict) {
  if (!(t > 0.0)) throw DomainError("variance oracle needs t > 0");
  if (op.beta.is_infinite()) throw Unsupported("beta = infinity removes the noise term");
  if (y.dim() != op.n) throw DomainError("probe dimension must equal n");
  const double beta = op.beta.value();
  quad::QuadResult<double> r;
  if (beta == 0.0) {
    const double peak = y.norm() * y.norm() / (2.0 * op.n);
    std::vector<double> breaks;
    if (peak < t) breaks = {peak, 0.5 * peak, 2.0 * peak};
    r = quad::integrate_finite([&](double s) { const double p = specfun::heat_kernel_free(op.n, s, y); return p * p; }, 0.0,
                               t, spec, breaks);
  } else {
    if (op.n != 3) throw Unsupported("beta != 0 is implemented for n = 3");
    r = quad::integrate_finite(
        [&](double s) {
          const double v = heatkernel::r_beta(s, y, op, spec, dict).value;
          return v * v;
        },
        0.0, t, spec, quad::geometric_breaks(t, 6));
    r.value /= beta * beta;
  }
  if (!r.converged) throw NonConvergence("variance oracle quadrature did not converge");
  return r.value;
}

namespace {

// max_{u >= 0} (c + u)^m exp(-r u) for m >= -1, c > 0.
double power_exp_bound(double c, double m, double r) {
  if (m <= 0.0) return std::pow(c, m);
  const double u = m / r - c;
  return u > 0.0 ? std::pow(m / r, m) * std::exp(-r * u) : std::pow(c, m);
}

}  // namespace

double covariance(double t, const Point& x, const Point& y, int n, const quad::QuadratureSpec& spec) {
  if (!(t > 0.0)) throw DomainError("covariance needs t > 0");
  if (x.dim() != n || y.dim() != n) throw DomainError("point dimension must equal n");
  if (x.norm() < specfun::origin_floor || y.norm() < specfun::origin_floor) throw SingularityError("points must be nonzero");
  const double A = x.norm() * x.norm() + y.norm() * y.norm();
  // s = 1/w: (4 pi)^{-n} int_{1/t}^inf w^{n-2} exp(-A w / 4) dw.
  const double c = 1.0 / t, m = n - 2.0, rate = A / 8.0;
  auto f = [&](double u) { return std::pow(c + u, m) * std::exp(-A * (c + u) / 4.0); };
  const quad::DecayCertificate cert{rate, power_exp_bound(c, m, rate) * std::exp(-A * c / 4.0)};
  auto r = quad::integrate_halfline(f, spec, cert);
  if (!r.converged) throw NonConvergence("covariance quadrature did not converge");
  return std::pow(4.0 * pi, -n) * r.value;
}

Estimate covariance_constant(int n) {
  if (n < 1) throw DomainError("dimension must be >= 1");
  // int_0^inf w^{n-2} e^{-w/4} dw, split at w = 1; the inner piece with w = e^{-s}.
  auto compute = [](int dim) {
    const double m = dim - 2.0;
    auto inner = integrate_with_divergence_check(
        [m](double s) { return std::exp(-(m + 1.0) * s - 0.25 * std::exp(-s)); }, quad::QuadratureSpec::precise());
    if (inner.estimate.diverged) return inner.estimate;
    auto outer = quad::integrate_halfline([m](double u) { return std::pow(1.0 + u, m) * std::exp(-0.25 * (1.0 + u)); },
                                          quad::QuadratureSpec::precise(),
                                          {0.125, power_exp_bound(1.0, m, 0.125) * std::exp(-0.25)});
    const double scale = std::pow(4.0 * pi, -dim);
    return Estimate{scale * (inner.estimate.value + outer.value),
                    scale * (inner.estimate.error_estimate + outer.error_estimate), false};
  };
  static const std::array<Estimate, 4> table = [&] {
    std::array<Estimate, 4> t{};
    for (int d = 1; d <= 3; ++d) t[static_cast<std::size_t>(d)] = compute(d);
    return t;
  }();
  if (n <= 3) return table[static_cast<std::size_t>(n)];
  return compute(n);
}

Estimate limiting_covariance(const Point& x, const Point& y, int n) {
  if (x.dim() != n || y.dim() != n) throw DomainError("point dimension must equal n");
  if (x.norm() < specfun::origin_floor || y.norm() < specfun::origin_floor) throw SingularityError("points must be nonzero");
  Estimate c = covariance_constant(n);
  if (c.diverged) return c;
  const double A = x.norm() * x.norm() + y.norm() * y.norm();
  const double s = std::pow(A, 1.0 - n);
  return {c.value * s, c.error_estimate * s, false};
}

// ---------------------------------------------------------------------------
// Well-posedness predicates

double wellposed_beta0_inner(int n, double t, double r) {
  if (n != 2 && n != 3) throw DomainError("n must be 2 or 3");
  const double x = r * r / (2.0 * t);
  // Gamma(1, x) = e^{-x}, Gamma(2, x) = (1 + x) e^{-x}.
  const double g = n == 2 ? std::exp(-x) : (1.0 + x) * std::exp(-x);
  return std::pow(4.0 * pi, -n) * std::pow(2.0 / (r * r), n - 1) * g;
}

WellPosednessReport wellposed_beta0(const sobolev::SpaceContext& ctx, double t, const quad::QuadratureSpec& spec) {
  ctx.validate();
  const int n = ctx.n;
  const double p = ctx.p;
  if (n != 2 && n != 3) throw DomainError("n must be 2 or 3");
  if (!(t > 0.0)) throw DomainError("t must be > 0");
  WellPosednessReport rep;
  rep.n = n;
  rep.p = p;
  const double threshold = n / (n - 1.0);
  rep.finite = -n * p + p + n > 0.0;
  rep.threshold_note = "finite iff p < n/(n-1) = " + std::to_string(threshold);

  const double area = sphere_area(n);
  // |y| = e^{-s} on the unit ball, in log form so that s can grow without underflow.
  auto near = [&](double s) {
    const double x = std::exp(-2.0 * s) / (2.0 * t);
    const double log_g = n == 2 ? -x : std::log1p(x) - x;
    const double log_inner = -n * std::log(4.0 * pi) + (n - 1) * (std::log(2.0) + 2.0 * s) + log_g;
    return area * std::exp(-n * s + 0.5 * p * log_inner);
  };
  auto inner = integrate_with_divergence_check(near, spec);
  rep.estimate = inner.estimate;
  if (inner.estimate.diverged) return rep;
  // The integrand is below exp(-p r^2 / 4t) beyond the unit ball; cut where that is e^{-70}.
  const double R = std::max(2.0, std::sqrt(280.0 * t / p));
  auto far = quad::integrate_finite(
      [&](double r) { return area * std::pow(r, n - 1) * std::pow(wellposed_beta0_inner(n, t, r), 0.5 * p); }, 1.0, R, spec);
  rep.estimate.value += far.value;
  rep.estimate.error_estimate += far.error_estimate;
  return rep;
}

WellPosednessReport wellposed_beta_nonzero(double p, const quad::QuadratureSpec& spec) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("p must be positive and finite");
  WellPosednessReport rep;
  rep.n = 3;
  rep.p = p;
  rep.finite = p > 1.5 && p < 3.0;
  rep.threshold_note = p <= 1.5 ? "p <= 3/2: the boundary functional is undefined on the solution space; J(p) itself is finite"
                                 : "finite iff p < 3";
  constexpr double euler_gamma = 0.57721566490153286061;
  // G_2(sqrt2 e^{-s}), switching to the logarithmic asymptote near the origin.
  auto log_g2 = [&](double s) {
    if (s > 18.0) return std::log((s + 0.5 * std::log(2.0) - euler_gamma) / (2.0 * pi));
    return std::log(specfun::bessel_potential(2, std::sqrt(2.0) * std::exp(-s), spec).value);
  };
  auto near = [&](double s) { return 4.0 * pi * std::exp(-(3.0 - p) * s + 0.5 * p * log_g2(s)); };
  auto inner = integrate_with_divergence_check(near, spec);
  rep.estimate = inner.estimate;
  if (inner.estimate.diverged) return rep;
  // G_2(sqrt2 r)^{p/2} <= exp(-p r / sqrt2) for r >= 1.
  const double R = 1.0 + 100.0 / p;
  auto far = quad::integrate_finite(
      [&](double r) {
        return 4.0 * pi * std::pow(r, 2.0 - p) * std::pow(specfun::bessel_potential(2, std::sqrt(2.0) * r, spec).value, 0.5 * p);
      },
      1.0, R, spec);
  rep.estimate.value += far.value;
  rep.estimate.error_estimate += far.error_estimate;
  return rep;
}

InvariantMeasureReport invariant_measure_exists(int n, double l, const quad::QuadratureSpec& spec) {
  if (n != 2 && n != 3) throw DomainError("n must be 2 or 3");
  if (!(l > 0.5 * n)) throw ContractViolation("need l > n/2 for the Hilbert-Schmidt embedding");
  InvariantMeasureReport rep;
  rep.exists = n == 3;
  const double m = n - 2.0;
  // r = e^{-s} on (0, 1] and r = e^{s} on [1, inf).
  auto inner = integrate_with_divergence_check([&](double s) { return std::exp(-m * s) * std::pow(1.0 + std::exp(-2.0 * s), -l); }, spec);
  if (inner.estimate.diverged) {
    rep.diagnostic = inner.estimate;
    return rep;
  }
  auto outer = integrate_with_divergence_check(
      [&](double s) { return std::exp(m * s - l * std::log1p(std::exp(2.0 * s))); }, spec);
  rep.diagnostic = outer.estimate;
  if (!outer.estimate.diverged) {
    rep.diagnostic.value += inner.estimate.value;
    rep.diagnostic.error_estimate += inner.estimate.error_estimate;
  }
  return rep;
}

bool hl_wellposed_beta_nonzero(double l) { return -2.0 + l > -1.0; }

Estimate hl_time_integral(double l, double t, const quad::QuadratureSpec& spec) {
  if (!(t > 0.0)) throw DomainError("t must be > 0");
  // s = t e^{-sigma}.
  auto r = integrate_with_divergence_check([&](double sigma) { return std::pow(t, l - 1.0) * std::exp(-(l - 1.0) * sigma); }, spec);
  return r.estimate;
}

// ---------------------------------------------------------------------------
// Statistics

double Moments::mean_stderr() const { return std::sqrt(variance / static_cast<double>(count)); }
double Moments::variance_stderr() const { return variance * std::sqrt(2.0 / (static_cast<double>(count) - 1.0)); }
double Moments::skewness_stderr() const { return std::sqrt(6.0 / static_cast<double>(count)); }
double Moments::kurtosis_stderr() const { return std::sqrt(24.0 / static_cast<double>(count)); }

Moments sample_moments(const std::vector<double>& x) {
  if (x.size() < 2) throw DomainError("need at least two samples");
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean, d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  return {mean, m2 * n / (n - 1.0), m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0, x.size()};
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.0) {
    // Theta-function form, fast for small x.
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double a = (2.0 * k - 1.0) * pi / x;
      s += std::exp(-a * a / 8.0);
    }
    return 1.0 - std::sqrt(2.0 * pi) / x * s;
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("KS test needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, kolmogorov_sf(std::sqrt(na * nb / (na + nb)) * d)};
}

}  // namespace puncture::spde
