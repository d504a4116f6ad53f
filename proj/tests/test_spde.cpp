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

#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "puncture/heatkernel.hpp"
#include "puncture/spde.hpp"
#include "puncture/specfun.hpp"

using namespace puncture;
using namespace puncture::spde;
using operators::PointInteraction;

namespace {

std::vector<double> column(const PathEnsemble& e, std::size_t k, std::size_t i) {
  std::vector<double> v(e.n_paths);
  for (std::size_t p = 0; p < e.n_paths; ++p) v[p] = e.sample(p, k, i);
  return v;
}

SimulationConfig boundary_noise_config(std::size_t paths, double dt) {
  SimulationConfig cfg;
  cfg.op = PointInteraction(3, ExtReal(8.0 * pi));
  cfg.T = 1.0;
  cfg.dt = dt;
  cfg.points = {Point{1.0, 0.0, 0.0}, Point{0.0, 0.5, 0.0}, Point{1.2, 0.9, 0.0}};
  cfg.n_paths = paths;
  cfg.seed = 20261017;
  return cfg;
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
  auto a = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(a == PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  auto b = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(b == PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  auto c = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(c == PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal variates: moments and stream independence") {
  std::vector<double> z;
  for (std::uint64_t path = 0; path < 200; ++path)
    for (std::uint64_t step = 0; step < 500; ++step) z.push_back(standard_normal(7, path, step));
  auto m = sample_moments(z);
  CHECK(std::abs(m.mean) < 4.0 * m.mean_stderr());
  CHECK(std::abs(m.variance - 1.0) < 4.0 * m.variance_stderr());
  CHECK(std::abs(m.skewness) < 4.0 * m.skewness_stderr());
  CHECK(std::abs(m.excess_kurtosis) < 4.0 * m.kurtosis_stderr());
  CHECK(standard_normal(7, 3, 4) == standard_normal(7, 3, 4));
  CHECK(standard_normal(7, 3, 4) != standard_normal(8, 3, 4));
  CHECK(standard_normal(7, 3, 4) != standard_normal(7, 4, 3));
}

TEST_CASE("kolmogorov distribution and two-sample KS") {
  // Reference values of the Kolmogorov survival function.
  CHECK(kolmogorov_sf(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-13));
  CHECK(kolmogorov_sf(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-13));
  CHECK(kolmogorov_sf(1.2) == doctest::Approx(0.11224966667072497).epsilon(1e-13));
  CHECK(kolmogorov_sf(0.0) == 1.0);
  // Both branches agree at the switch point.
  CHECK(kolmogorov_sf(1.0 - 1e-12) == doctest::Approx(kolmogorov_sf(1.0)).epsilon(1e-10));

  std::vector<double> a, b, shifted;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    a.push_back(standard_normal(1, i, 0));
    b.push_back(standard_normal(2, i, 0));
    shifted.push_back(standard_normal(3, i, 0) + 0.3);
  }
  auto same = ks_two_sample(a, a);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);
  CHECK(ks_two_sample(a, b).p_value > 0.01);
  CHECK(ks_two_sample(a, shifted).p_value < 1e-6);
  CHECK(ks_two_sample({0.0, 1.0}, {2.0, 3.0}).statistic == 1.0);
}

TEST_CASE("simulation config validation") {
  auto cfg = boundary_noise_config(10, 0.1);
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.op = PointInteraction(2, ExtReal(1.0));
  bad.points = {Point{1.0, 0.0}};
  CHECK_THROWS_AS(simulate(bad), Unsupported);
  bad = cfg;
  bad.points.push_back(Point{0.0, 0.0, 0.0});
  CHECK_THROWS_AS(simulate(bad), SingularityError);
  bad = cfg;
  bad.dt = 0.3;
  CHECK_THROWS_AS(simulate(bad), DomainError);
  bad = cfg;
  bad.dt = 2.0;
  CHECK_THROWS_AS(simulate(bad), DomainError);
  bad = cfg;
  bad.op = PointInteraction(3, ExtReal::infinity());
  CHECK_THROWS_AS(simulate(bad), Unsupported);
  bad = cfg;
  bad.n_paths = 0;
  CHECK_THROWS_AS(simulate(bad), DomainError);
}

TEST_CASE("beta = 0 probe close to the origin raises a warning") {
  SimulationConfig cfg;
  cfg.op = PointInteraction(3, ExtReal(0.0));
  cfg.T = 0.5;
  cfg.dt = 0.05;
  cfg.points = {Point{0.1, 0.0, 0.0}, Point{2.0, 0.0, 0.0}};
  cfg.n_paths = 8;
  auto e = simulate(cfg);
  REQUIRE(e.warnings.size() == 1);
  CHECK(e.warnings[0].find("probe 0") != std::string::npos);
}

TEST_CASE("boundary noise ensemble: zero mean, oracle variance, gaussianity") {
  auto cfg = boundary_noise_config(10000, 5e-3);
  auto e = simulate(cfg);
  REQUIRE(e.times.size() == 201);
  CHECK(e.times.back() == doctest::Approx(1.0));

  for (std::size_t k : {50u, 100u, 150u, 200u})
    for (std::size_t i = 0; i < e.probes.size(); ++i) {
      const double se = std::sqrt(e.variance_at(k, i) / static_cast<double>(e.n_paths));
      CHECK(std::abs(e.mean_at(k, i)) <= 3.0 * se);
    }
  for (std::size_t i = 0; i < e.probes.size(); ++i) {
    CHECK(e.mean_at(0, i) == 0.0);
    CHECK(e.variance_at(0, i) == 0.0);
  }

  // Variance at t = 1, |y| = 1 against the continuum oracle.
  const double oracle = variance_oracle(cfg.op, 1.0, cfg.points[0]);
  auto m = sample_moments(column(e, 200, 0));
  CHECK(m.variance == doctest::Approx(e.variance_at(200, 0)).epsilon(1e-9));
  CHECK(std::abs(m.variance - oracle) <= 3.0 * m.variance_stderr());

  for (std::size_t i = 0; i < e.probes.size(); ++i) {
    auto mi = sample_moments(column(e, 200, i));
    CHECK(std::abs(mi.skewness) <= 4.0 * mi.skewness_stderr());
    CHECK(std::abs(mi.excess_kurtosis) <= 4.0 * mi.kurtosis_stderr());
  }
}

TEST_CASE("ensembles are bit-identical across runs and thread counts") {
  auto cfg = boundary_noise_config(300, 0.02);
  cfg.threads = 1;
  auto a = simulate(cfg);
  cfg.threads = 4;
  auto b = simulate(cfg);
  auto c = simulate(cfg);
  CHECK(a.samples == b.samples);
  CHECK(b.samples == c.samples);
  CHECK(a.mean == b.mean);
  CHECK(a.variance == b.variance);
  cfg.seed += 1;
  CHECK(simulate(cfg).samples != a.samples);

  // Summaries do not depend on whether samples are stored.
  cfg.seed -= 1;
  cfg.store_samples = false;
  auto d = simulate(cfg);
  CHECK(d.samples.empty());
  CHECK(d.mean == a.mean);
  CHECK(d.variance == a.variance);
}

TEST_CASE("deterministic initial condition shifts the mean by S(t) u0") {
  auto cfg = boundary_noise_config(2000, 0.05);
  cfg.points = {Point{1.0, 0.0, 0.0}};
  cfg.u0 = operators::Source{[](const Point& x) { return Complex(std::exp(-x.norm() * x.norm()), 0.0); }, true, {1.0, std::exp(0.25)}};
  auto e = simulate(cfg);
  const std::size_t k = e.times.size() - 1;
  const double s = heatkernel::semigroup_apply(cfg.op, 1.0, *cfg.u0, cfg.points[0]);
  const double se = std::sqrt(e.variance_at(k, 0) / static_cast<double>(e.n_paths));
  CHECK(std::abs(e.mean_at(k, 0) - s) <= 3.0 * se);
  CHECK(e.mean_at(0, 0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("variance oracle") {
  const Point y{1.0, 0.0, 0.0};
  SUBCASE("beta = 0 against the incomplete gamma closed form") {
    // (4 pi)^{-3} int_0^1 s^{-3} e^{-1/2s} ds = (4 pi)^{-3} 4 Gamma(2, 1/2).
    const double v = variance_oracle(PointInteraction(3, ExtReal(0.0)), 1.0, y, quad::QuadratureSpec::precise());
    const double closed = std::pow(4.0 * pi, -3) * 4.0 * boost::math::tgamma(2.0, 0.5);
    CHECK(v == doctest::Approx(closed).epsilon(1e-12));
    CHECK(closed == doctest::Approx(std::pow(4.0 * pi, -3) * 6.0 * std::exp(-0.5)).epsilon(1e-14));
  }
  SUBCASE("beta = 0, n = 2") {
    // int_0^1 (4 pi s)^{-2} e^{-1/2s} ds = (4 pi)^{-2} 2 Gamma(1, 1/2).
    const double v = variance_oracle(PointInteraction(2, ExtReal(0.0)), 1.0, Point{1.0, 0.0});
    CHECK(v == doctest::Approx(std::pow(4.0 * pi, -2) * 2.0 * std::exp(-0.5)).epsilon(1e-10));
  }
  SUBCASE("monotone decay as t -> 0") {
    const PointInteraction op(3, ExtReal(8.0 * pi));
    double prev = variance_oracle(op, 1.0, y);
    for (double t : {0.5, 0.1, 0.03, 0.01}) {
      const double v = variance_oracle(op, t, y);
      CHECK(v < prev);
      prev = v;
    }
    CHECK(prev < 1e-6 * variance_oracle(op, 1.0, y));
  }
  SUBCASE("the 1/beta^2 factor") {
    for (double beta : {8.0 * pi, 16.0 * pi, -50.0}) {
      const PointInteraction op(3, ExtReal(beta));
      auto r = quad::integrate_finite(
          [&](double s) {
            const double v = heatkernel::r_beta(s, y, op).value;
            return v * v;
          },
          0.0, 1.0, {}, quad::geometric_breaks(1.0, 6));
      CHECK(variance_oracle(op, 1.0, y) * beta * beta == doctest::Approx(r.value).epsilon(1e-9));
    }
    // R_beta also depends on beta, so doubling beta does not simply quarter the oracle.
    const double q = variance_oracle(PointInteraction(3, ExtReal(16.0 * pi)), 1.0, y) /
                     variance_oracle(PointInteraction(3, ExtReal(8.0 * pi)), 1.0, y);
    CHECK(std::abs(q - 0.25) > 0.01);
  }
}

TEST_CASE("discretization error of the variance is first order in dt") {
  const PointInteraction op(3, ExtReal(8.0 * pi));
  const Point y{1.0, 0.0, 0.0};
  const double oracle = variance_oracle(op, 1.0, y, quad::QuadratureSpec::precise());
  std::vector<double> err;
  for (double dt : {1e-2, 5e-3, 2.5e-3}) {
    const auto K = static_cast<std::size_t>(std::llround(1.0 / dt));
    auto w = convolution_weights(op, dt, K, y);
    err.push_back(std::abs(scheme_variance(w, dt, K) - oracle));
  }
  CHECK(err[0] / err[1] == doctest::Approx(2.0).epsilon(0.05));
  CHECK(err[1] / err[2] == doctest::Approx(2.0).epsilon(0.05));

  // The empirical variance tracks the scheme variance at each step size.
  for (double dt : {1e-2, 5e-3, 2.5e-3}) {
    auto cfg = boundary_noise_config(4000, dt);
    cfg.points = {y};
    auto e = simulate(cfg);
    auto m = sample_moments(column(e, e.times.size() - 1, 0));
    CHECK(std::abs(m.variance - oracle) <= 3.0 * m.variance_stderr());
  }
}

TEST_CASE("markov property: restarting at t1 with fresh noise") {
  // beta = 0, n = 3. The restart state S(t2) X(t1) is formed by applying the
  // semigroup numerically to each kernel column P(t1 - t_j, .).
  const PointInteraction op(3, ExtReal(0.0));
  const double dt = 0.02, t1 = 0.5, t2 = 0.5;
  const std::size_t K1 = 25, K = 50;
  const Point x{1.0, 0.0, 0.0};

  std::vector<double> restart_w(K1);
  for (std::size_t j = 0; j < K1; ++j) {
    const double tau = t1 - static_cast<double>(j) * dt;
    operators::Source col{[tau](const Point& z) { return Complex(heatkernel::gaussian(tau, z.norm()), 0.0); }, true,
                          {1.0, std::pow(4.0 * pi * tau, -1.5) * std::exp(tau)}};
    restart_w[j] = heatkernel::semigroup_apply(op, t2, col, x);
    CHECK(restart_w[j] == doctest::Approx(heatkernel::gaussian(t1 + t2 - static_cast<double>(j) * dt, 1.0)).epsilon(1e-7));
  }
  auto w = convolution_weights(op, dt, K, x);

  const std::size_t paths = 3000;
  std::vector<double> direct(paths), restarted(paths);
  const double sq = std::sqrt(dt);
  for (std::size_t p = 0; p < paths; ++p) {
    double d = 0.0, r = 0.0;
    for (std::size_t j = 0; j < K; ++j) d += w[K - j] * sq * standard_normal(11, p, j);
    for (std::size_t j = 0; j < K1; ++j) r += restart_w[j] * sq * standard_normal(12, p, j);
    for (std::size_t j = K1; j < K; ++j) r += w[K - j] * sq * standard_normal(13, p, j);
    direct[p] = d;
    restarted[p] = r;
  }
  auto ks = ks_two_sample(direct, restarted);
  MESSAGE("KS statistic " << ks.statistic << ", p = " << ks.p_value);
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("spatial covariance for beta = 0") {
  SimulationConfig cfg;
  cfg.op = PointInteraction(3, ExtReal(0.0));
  cfg.T = 1.0;
  cfg.dt = 5e-3;
  cfg.points = {Point{1.0, 0.0, 0.0}, Point{0.0, 1.5, 0.0}, Point{0.7, 0.7, 0.0}};
  cfg.n_paths = 10000;
  cfg.seed = 99;
  auto e = simulate(cfg);
  const std::size_t k = e.times.size() - 1;
  auto a = column(e, k, 0);
  for (std::size_t i : {1u, 2u}) {
    auto b = column(e, k, i);
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t p = 0; p < a.size(); ++p) ma += a[p] / n, mb += b[p] / n;
    double c = 0, va = 0, vb = 0;
    for (std::size_t p = 0; p < a.size(); ++p) {
      c += (a[p] - ma) * (b[p] - mb);
      va += (a[p] - ma) * (a[p] - ma);
      vb += (b[p] - mb) * (b[p] - mb);
    }
    c /= n - 1;
    va /= n - 1;
    vb /= n - 1;
    const double se = std::sqrt((va * vb + c * c) / n);
    const double oracle = covariance(1.0, cfg.points[0], cfg.points[i], 3);
    CHECK(std::abs(c - oracle) <= 3.0 * se);
  }
}

TEST_CASE("covariance and its limit") {
  const Point x{1.0, 0.0, 0.0}, y{0.0, 2.0, 0.0};
  CHECK(covariance(1.0, x, y, 3) == covariance(1.0, y, x, 3));
  // Gamma(t, x, y) / Gamma(x, y) = Gamma(n - 1, A / 4t) / Gamma(n - 1), A = |x|^2 + |y|^2.
  const double lim = limiting_covariance(x, y, 3).value;
  double prev = 0.0;
  for (double t : {1.0, 10.0, 100.0}) {
    const double ratio = covariance(t, x, y, 3, quad::QuadratureSpec::precise()) / lim;
    CHECK(ratio == doctest::Approx(boost::math::gamma_q(2.0, 5.0 / (4.0 * t))).epsilon(1e-10));
    CHECK(ratio > prev);
    CHECK(ratio < 1.0);
    prev = ratio;
  }
  CHECK(prev > 0.9999);

  CHECK(covariance_constant(3).value == doctest::Approx(16.0 * std::pow(4.0 * pi, -3)).epsilon(1e-12));
  CHECK(covariance_constant(2).value == doctest::Approx(4.0 * std::pow(4.0 * pi, -2)).epsilon(1e-12));
  CHECK(covariance_constant(1).diverged);
  CHECK(limiting_covariance(Point{1.0}, Point{2.0}, 1).diverged);

  for (int n : {2, 3}) {
    const Point a = Point::radial(n, 0.7), b = Point::radial(n, 1.3);
    const double s = 2.5;
    const Point sa = Point::radial(n, 0.7 * s), sb = Point::radial(n, 1.3 * s);
    CHECK(limiting_covariance(sa, sb, n).value ==
          doctest::Approx(std::pow(s, -2.0 * n + 2.0) * limiting_covariance(a, b, n).value).epsilon(1e-13));
  }
  CHECK_THROWS_AS(covariance(1.0, Point{0.0, 0.0, 0.0}, y, 3), SingularityError);
}

TEST_CASE("divergence detector") {
  auto conv = integrate_with_divergence_check([](double s) { return std::exp(-0.01 * s); });
  CHECK_FALSE(conv.estimate.diverged);
  CHECK(conv.estimate.value == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(integrate_with_divergence_check([](double) { return 1.0; }).estimate.diverged);
  CHECK(integrate_with_divergence_check([](double s) { return 1.0 / (1.0 + s); }).estimate.diverged);
  CHECK(integrate_with_divergence_check([](double s) { return std::exp(0.01 * s); }).estimate.diverged);
}

TEST_CASE("I(t, p) well-posedness for beta = 0") {
  CHECK(wellposed_beta0({2, 1.5}).finite);
  CHECK_FALSE(wellposed_beta0({2, 1.5}).estimate.diverged);
  CHECK_FALSE(wellposed_beta0({3, 1.6}).finite);
  CHECK(wellposed_beta0({3, 1.6}).estimate.diverged);

  // Closed-form inner integral against quadrature.
  for (int n : {2, 3})
    for (double r : {0.1, 1.0, 2.5}) {
      auto q = quad::integrate_finite(
          [&](double s) { return std::pow(4.0 * pi * s, -n) * std::exp(-2.0 * r * r / (4.0 * s)); }, 0.0, 1.0,
          quad::QuadratureSpec::precise(), quad::geometric_breaks(1.0, 20));
      CHECK(wellposed_beta0_inner(n, 1.0, r) == doctest::Approx(q.value).epsilon(1e-10));
    }

  for (int n : {2, 3}) {
    const double p0 = n / (n - 1.0);
    for (int i = 0; i < 20; ++i) {
      const double p = 1.05 + i * (p0 + 0.5 - 1.05) / 19.0;
      auto rep = wellposed_beta0({n, p});
      CHECK(rep.finite == (p < p0));
      CHECK(rep.finite == !rep.estimate.diverged);
    }
    // Blow-up: the leading term scales like 1/(p0 - p).
    const double a = wellposed_beta0({n, p0 - 0.1}).estimate.value;
    const double b = wellposed_beta0({n, p0 - 0.01}).estimate.value;
    const double c = wellposed_beta0({n, p0 - 0.001}).estimate.value;
    MESSAGE("n = " << n << " growth ratios " << b / a << ", " << c / b);
    CHECK(b / a > 5.0);
    CHECK(c / b > 9.0);
    CHECK(wellposed_beta0({n, p0}).estimate.diverged);
  }
}

TEST_CASE("J(p) well-posedness for beta != 0") {
  auto two = wellposed_beta_nonzero(2.0);
  CHECK(two.finite);
  // J(2) = 4 pi int_0^inf G_2(sqrt2 r) dr = pi / sqrt2.
  CHECK(two.estimate.value == doctest::Approx(pi / std::sqrt(2.0)).epsilon(1e-12));
  auto refined = wellposed_beta_nonzero(2.0, quad::QuadratureSpec::precise());
  CHECK(std::abs(refined.estimate.value - two.estimate.value) <= 1e-6 * refined.estimate.value);

  CHECK_FALSE(wellposed_beta_nonzero(3.0).finite);
  CHECK(wellposed_beta_nonzero(3.0).estimate.diverged);
  CHECK_FALSE(wellposed_beta_nonzero(1.4).finite);
  CHECK_FALSE(wellposed_beta_nonzero(1.4).estimate.diverged);

  for (int i = 0; i < 20; ++i) {
    const double p = 1.6 + i * (3.5 - 1.6) / 19.0;
    auto rep = wellposed_beta_nonzero(p);
    CHECK(rep.finite == (p < 3.0));
    CHECK(rep.finite == !rep.estimate.diverged);
  }
  const double growth = wellposed_beta_nonzero(2.99).estimate.value / wellposed_beta_nonzero(2.9).estimate.value;
  CHECK(growth > 10.0);
}

TEST_CASE("invariant measure on H^{-l}") {
  auto a = invariant_measure_exists(3, 2.0);
  CHECK(a.exists);
  CHECK(a.diagnostic.value == doctest::Approx(pi / 4.0).epsilon(1e-10));
  auto b = invariant_measure_exists(2, 2.0);
  CHECK_FALSE(b.exists);
  CHECK(b.diagnostic.diverged);
  auto c = invariant_measure_exists(3, 1.6);
  CHECK(c.exists);
  // int_0^inf (1 + r^2)^{-l} dr = sqrt(pi) Gamma(l - 1/2) / (2 Gamma(l)).
  CHECK(c.diagnostic.value == doctest::Approx(std::sqrt(pi) * std::tgamma(1.1) / (2.0 * std::tgamma(1.6))).epsilon(1e-9));
  CHECK_THROWS_AS(invariant_measure_exists(3, 1.5), ContractViolation);
  CHECK_THROWS_AS(invariant_measure_exists(2, 0.9), ContractViolation);
}

TEST_CASE("H^{-l} well-posedness for beta != 0") {
  CHECK(hl_wellposed_beta_nonzero(1.5));
  CHECK_FALSE(hl_wellposed_beta_nonzero(1.0));
  CHECK_FALSE(hl_wellposed_beta_nonzero(0.5));
  CHECK(hl_time_integral(1.5).value == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(hl_time_integral(1.0).diverged);
  CHECK(hl_time_integral(0.5).diverged);
  for (double l = 0.55; l < 3.0; l += 0.1) CHECK(hl_wellposed_beta_nonzero(l) == !hl_time_integral(l).diverged);
}
