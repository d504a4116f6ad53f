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
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "puncture/common.hpp"
#include "puncture/operators.hpp"
#include "puncture/quad.hpp"
#include "puncture/sobolev.hpp"

// Boundary-noise heat equation driven by a scalar Wiener process W:
//   u(t, y) = S_beta(t) u0(y) + (1/beta) int_0^t R_beta(t - s, y) dW(s),   beta != 0, n = 3,
//   X(t, x) = int_0^t P(t - s, x) dW(s),                                     beta = 0, n = 2, 3.
namespace puncture::spde {

// Philox4x32-10 block function.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key);

// Standard normal variate for (seed, path, step), via Box-Muller on one Philox block.
double standard_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step);

struct SimulationConfig {
  operators::PointInteraction op;
  double T = 1.0;
  double dt = 1e-2;
  std::vector<Point> points;
  std::size_t n_paths = 1000;
  std::uint64_t seed = 0;
  std::optional<operators::Source> u0;

  operators::Dictionary dict = operators::Dictionary::EightPi;
  quad::QuadratureSpec spec{};
  unsigned threads = 0;  // 0: hardware concurrency
  bool store_samples = true;

  // Number of steps K with K dt = T.
  std::size_t steps() const;
  void validate() const;
};

struct PathEnsemble {
  std::vector<double> times;
  std::vector<Point> probes;
  std::size_t n_paths = 0;
  // samples[(path * times.size() + k) * probes.size() + i]; empty unless stored.
  std::vector<double> samples;
  // [k * probes.size() + i]
  std::vector<double> mean;
  std::vector<double> variance;  // unbiased
  std::vector<std::string> warnings;

  double sample(std::size_t path, std::size_t k, std::size_t i) const {
    return samples[(path * times.size() + k) * probes.size() + i];
  }
  double mean_at(std::size_t k, std::size_t i) const { return mean[k * probes.size() + i]; }
  double variance_at(std::size_t k, std::size_t i) const { return variance[k * probes.size() + i]; }
};

// w[m] = (1/beta) R_beta(m dt, y) or P(m dt, y) for m = 0..steps; w[0] = 0.
std::vector<double> convolution_weights(const operators::PointInteraction& op, double dt, std::size_t steps,
                                        const Point& y, const quad::QuadratureSpec& spec = {},
                                        operators::Dictionary dict = operators::Dictionary::EightPi);

PathEnsemble simulate(const SimulationConfig& cfg);

// Exact variance of the discrete scheme at t_k = k dt: dt sum_{m=1}^k w[m]^2.
double scheme_variance(const std::vector<double>& w, double dt, std::size_t k);

// (1/beta^2) int_0^t R_beta(s, y)^2 ds, or int_0^t P(s, y)^2 ds for beta = 0.
double variance_oracle(const operators::PointInteraction& op, double t, const Point& y,
                       const quad::QuadratureSpec& spec = {},
                       operators::Dictionary dict = operators::Dictionary::EightPi);

// A quadrature value or a divergence verdict.
struct Estimate {
  double value = 0.0;
  double error_estimate = 0.0;
  bool diverged = false;
};

// int_0^t P(s, x) P(s, y) ds in R^n.
double covariance(double t, const Point& x, const Point& y, int n, const quad::QuadratureSpec& spec = {});
// C_n = (4 pi)^{-n} int_0^inf s^{-n} exp(-1/4s) ds; diverged for n = 1.
Estimate covariance_constant(int n);
// C_n (|x|^2 + |y|^2)^{1-n}.
Estimate limiting_covariance(const Point& x, const Point& y, int n);

// int_0^inf g(s) ds by successive doublings L = 1, 2, 4, ... of the upper limit.
// Converged once an increment falls below tol times the running sum while
// shrinking; diverged if the increments overflow or if, when the doubling
// budget is spent, the last three increments were non-decreasing.
struct TruncatedIntegral {
  Estimate estimate;
  std::vector<double> partial_sums;
};
template <typename G>
TruncatedIntegral integrate_with_divergence_check(G&& g, const quad::QuadratureSpec& spec = {},
                                                  int max_doublings = 48);

struct WellPosednessReport {
  int n = 3;
  double p = 2.0;
  bool finite = false;  // closed criterion
  Estimate estimate;    // numerical integral
  std::string threshold_note;
};

// I(t, p) = int_{R^n} (int_0^t (4 pi s)^{-n} exp(-2|y|^2/4s) ds)^{p/2} dy; finite iff p < n/(n-1).
WellPosednessReport wellposed_beta0(const sobolev::SpaceContext& ctx, double t = 1.0,
                                    const quad::QuadratureSpec& spec = {});
// Inner time integral of I(t, p) at |y| = r, in closed form.
double wellposed_beta0_inner(int n, double t, double r);

// J(p) = int_{R^3} |y|^{-p} G_2(sqrt2 |y|)^{p/2} dy; well posed iff 3/2 < p < 3.
WellPosednessReport wellposed_beta_nonzero(double p, const quad::QuadratureSpec& spec = {});

struct InvariantMeasureReport {
  bool exists = false;
  Estimate diagnostic;  // int_0^inf (1 + r^2)^{-l} r^{n-3} dr
};
InvariantMeasureReport invariant_measure_exists(int n, double l, const quad::QuadratureSpec& spec = {});

bool hl_wellposed_beta_nonzero(double l);
// int_0^t s^{l-2} ds with divergence detection.
Estimate hl_time_integral(double l, double t = 1.0, const quad::QuadratureSpec& spec = {});

struct Moments {
  double mean, variance, skewness, excess_kurtosis;
  std::size_t count;
  // Large-sample standard errors under normality.
  double mean_stderr() const;
  double variance_stderr() const;
  double skewness_stderr() const;
  double kurtosis_stderr() const;
};
Moments sample_moments(const std::vector<double>& x);

struct KsResult {
  double statistic;
  double p_value;
};
// Kolmogorov survival function Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_sf(double x);
// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value Q(sqrt(nm/(n+m)) D).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// ---------------------------------------------------------------------------

template <typename G>
TruncatedIntegral integrate_with_divergence_check(G&& g, const quad::QuadratureSpec& spec, int max_doublings) {
  TruncatedIntegral out;
  auto diverge = [&] {
    out.estimate.diverged = true;
    out.estimate.value = std::numeric_limits<double>::infinity();
    return out;
  };
  double total = 0.0, err = 0.0;
  std::vector<double> inc;
  double lo = 0.0, hi = 1.0;
  for (int k = 0; k <= max_doublings; ++k) {
    double d = 0.0;
    try {
      auto r = quad::integrate_finite(g, lo, hi, spec, quad::geometric_breaks(hi, k == 0 ? 0 : 2));
      d = r.value;
      err += r.error_estimate;
    } catch (const EvaluationError&) {
      return diverge();
    }
    total += d;
    if (!std::isfinite(total) || std::abs(total) > 1e250) return diverge();
    out.partial_sums.push_back(total);
    inc.push_back(std::abs(d));
    const std::size_t m = inc.size();
    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
    if (m >= 3 && inc[m - 1] <= tol && inc[m - 1] <= inc[m - 2]) {
      out.estimate.value = total;
      out.estimate.error_estimate = err + inc[m - 1];
      return out;
    }
    lo = hi;
    hi *= 2.0;
  }
  const std::size_t m = inc.size();
  if (m >= 4 && inc[m - 1] >= inc[m - 2] && inc[m - 2] >= inc[m - 3] && inc[m - 3] >= inc[m - 4]) return diverge();
  throw NonConvergence("truncated integral neither converged nor grew within the doubling budget");
}

}  // namespace puncture::spde
