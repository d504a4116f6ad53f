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

#include "puncture/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "puncture/csv.hpp"
#include "puncture/heatkernel.hpp"
#include "puncture/operators.hpp"
#include "puncture/selftest.hpp"
#include "puncture/sobolev.hpp"
#include "puncture/spde.hpp"
#include "puncture/specfun.hpp"

namespace puncture::cli {

namespace {

using Json = nlohmann::ordered_json;
using operators::Dictionary;
using operators::PointInteraction;

struct Common {
  std::string format;
  std::string output;
  std::string config;
  std::optional<double> abs_tol, rel_tol;
  std::optional<int> max_subdivisions;

  quad::QuadratureSpec spec() const {
    quad::QuadratureSpec s;
    if (abs_tol) s.abs_tol = *abs_tol;
    if (rel_tol) s.rel_tol = *rel_tol;
    if (max_subdivisions) s.max_subdivisions = *max_subdivisions;
    s.validate();
    return s;
  }
  bool csv() const { return format == "csv"; }
};

struct Rendered {
  std::string text;
  std::string extension;
};

ExtReal parse_ext(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "+inf") return ExtReal::infinity();
  const double v = csv::parse_double(s);
  if (!std::isfinite(v)) throw DomainError("'" + s + "' is not a finite number or inf");
  return v;
}

double ext_cell(const ExtReal& v) { return v.is_infinite() ? INFINITY : v.value(); }

Json ext_json(const ExtReal& v) { return v.is_infinite() ? Json("inf") : Json(v.value()); }

// NaN and infinities have no JSON spelling; they become null.
Json num_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json complex_json(Complex z) { return Json{{"re", num_json(z.real())}, {"im", num_json(z.imag())}}; }

Complex complex_from(const std::vector<double>& v, const std::string& name) {
  if (v.empty()) return 0.0;
  if (v.size() > 2) throw DomainError(name + " takes a real part and an optional imaginary part");
  return {v[0], v.size() == 2 ? v[1] : 0.0};
}

Dictionary dictionary_from(const std::string& s) { return s == "boundary" ? Dictionary::BoundaryCondition : Dictionary::EightPi; }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// Appends `--key value...` for every config entry whose flag is absent, so flags win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file " + path);
  auto present = [&](const std::string& flag) {
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  std::string line;
  std::vector<std::string> extra;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError("config line without '=': " + line);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") throw DomainError("bad config key in: " + line);
    if (present("--" + key)) continue;
    extra.push_back("--" + key);
    std::istringstream tokens(value);
    for (std::string tok; tokens >> tok;) extra.push_back(tok);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

void add_common(CLI::App* sub, Common& c, const std::string& default_format) {
  c.format = default_format;
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_option("--output", c.output, "Output file (default: $" + std::string(output_dir_env) + "/<subcommand>.<ext> or stdout)");
  sub->add_option("--config", c.config, "key=value file; command-line flags take precedence");
  sub->add_option("--abs-tol", c.abs_tol, "Quadrature absolute tolerance");
  sub->add_option("--rel-tol", c.rel_tol, "Quadrature relative tolerance");
  sub->add_option("--max-subdivisions", c.max_subdivisions, "Quadrature subdivision budget");
}

template <typename Rows>
std::string table(const std::string& schema, const std::vector<std::string>& header, const Rows& rows) {
  std::ostringstream os;
  csv::Writer w(os, schema, header);
  for (const auto& r : rows) w.row(r);
  return os.str();
}

// ---------------------------------------------------------------------------

struct EvalKernelArgs {
  std::string fn = "G";
  int n = 3;
  double nu = 0.0, t = 1.0, lambda = 1.0;
  std::vector<double> radii;
};

Rendered eval_kernel(const EvalKernelArgs& a, const Common& c) {
  const auto spec = c.spec();
  const double param = a.fn == "K" ? a.nu : a.fn == "P" ? a.t : a.lambda;
  std::vector<std::vector<csv::Cell>> rows;
  Json out{{"fn", a.fn}, {"n", a.n}, {"param", param}, {"rows", Json::array()}};
  for (double r : a.radii) {
    specfun::KernelValue v;
    if (a.fn == "G")
      v = a.lambda == 1.0 ? specfun::bessel_potential(a.n, r, spec) : specfun::bessel_potential_scaled(a.n, a.lambda, r, spec);
    else if (a.fn == "K")
      v = specfun::macdonald_k(a.nu, r, spec);
    else if (a.fn == "P")
      v = {specfun::heat_kernel_free(a.n, a.t, r), 0.0, specfun::Method::closed_form};
    else
      v = specfun::grad_bessel_potential_norm(a.n, r, spec);
    rows.push_back({a.fn, std::int64_t{a.n}, param, r, v.value, v.error_estimate, specfun::to_string(v.method)});
    out["rows"].push_back({{"r", r}, {"value", num_json(v.value)}, {"error_estimate", v.error_estimate}, {"method", specfun::to_string(v.method)}});
  }
  if (c.csv()) return {table("kernel", {"fn", "n", "param", "r", "value", "error_estimate", "method"}, rows), "csv"};
  return {dump(out), "json"};
}

struct ClassifyArgs {
  std::vector<int> n;
  std::vector<double> p;
};

Rendered classify(const ClassifyArgs& a, const Common& c) {
  std::vector<std::vector<csv::Cell>> rows;
  Json list = Json::array();
  for (int n : a.n) {
    for (double p : a.p) {
      const auto rc = sobolev::classify(sobolev::SpaceContext(n, p));
      rows.push_back({std::int64_t{n}, p, sobolev::to_string(rc.tag), std::int64_t{rc.singular_dim}});
      list.push_back({{"n", n}, {"p", p}, {"case", sobolev::to_string(rc.tag)}, {"singular_dim", rc.singular_dim}});
    }
  }
  if (c.csv()) return {table("classify", {"n", "p", "case", "singular_dim"}, rows), "csv"};
  return {dump(list.size() == 1 ? list[0] : Json{{"rows", list}}), "json"};
}

struct DecomposeArgs {
  std::string mode = "1d";
  double u_plus = 0.0, u_minus = 0.0, du_plus = 0.0, du_minus = 0.0, p = 2.0;
  int n = 3;
  double lambda = 1.0, amplitude = 1.0, offset = 0.0;
};

Rendered decompose(const DecomposeArgs& a, const Common& c) {
  struct Coef {
    std::string name;
    Complex value;
    double error;
  };
  std::vector<Coef> coefs;
  Json out{{"mode", a.mode}};
  if (a.mode == "1d") {
    const sobolev::OneDBoundaryData b{a.u_plus, a.u_minus, a.du_plus, a.du_minus};
    const auto d = sobolev::decompose_1d(b, a.p);
    const auto lu = sobolev::solve_boundary_system_1d(b);
    const Complex closed[4] = {d.c0, d.c[0], *d.f0, (*d.grad_f0)[0]};
    double gap = 0.0;
    for (int i = 0; i < 4; ++i) gap = std::max(gap, std::abs(closed[i] - lu[i]));
    coefs = {{"c0", closed[0], gap}, {"c1", closed[1], gap}, {"f0", closed[2], gap}, {"f1", closed[3], gap}};
    out["case"] = sobolev::to_string(sobolev::classify(d.ctx).tag);
  } else {
    // u = amplitude G_{n,lambda} + offset exp(-|x|^2).
    const auto spec = quad::QuadratureSpec::precise();
    const int n = a.n;
    const double lambda = a.lambda, amp = a.amplitude, off = a.offset;
    sobolev::Evaluable u = [=](const Point& x) {
      const double r = x.norm();
      return Complex(amp * specfun::bessel_potential_scaled(n, lambda, r, spec).value + off * std::exp(-r * r));
    };
    const sobolev::SpaceContext ctx(n, a.p);
    const auto c0 = sobolev::extract_c0_by_limit(u, ctx);
    const auto f0 = sobolev::extract_f0(u, c0.value, ctx);
    coefs = {{"c0", c0.value, c0.error_estimate}, {"f0", f0.value, f0.error_estimate}};
  }
  std::vector<std::vector<csv::Cell>> rows;
  for (const auto& k : coefs) {
    rows.push_back({k.name, k.value.real(), k.value.imag(), k.error});
    out[k.name] = complex_json(k.value);
    out[k.name + "_error_estimate"] = k.error;
  }
  if (c.csv()) return {table("decomposition", {"coefficient", "re", "im", "error_estimate"}, rows), "csv"};
  return {dump(out), "json"};
}

struct PredicateArgs {
  int n = 3, m = 2;
  double p = 2.0;
};

Rendered predicates(const PredicateArgs& a, const Common& c) {
  const sobolev::SpaceContext ctx(a.n, a.p);
  std::vector<std::pair<std::string, std::string>> kv = {
      {"case", sobolev::to_string(sobolev::classify(ctx).tag)},
      {"zero_trace", sobolev::to_string(sobolev::zero_trace_case(ctx))},
      {"singleton_polar", sobolev::singleton_polar(a.m, ctx) ? "true" : "false"},
      {"test_functions_dense", sobolev::singleton_polar(2, ctx) ? "true" : "false"},
      {"friedrichs_unique", sobolev::friedrichs_unique(ctx) ? "true" : "false"},
      {"dirac_in_dual", sobolev::dirac_derivative_in_negative_sobolev(0, ctx) ? "true" : "false"},
      {"dirac_gradient_in_dual", sobolev::dirac_derivative_in_negative_sobolev(1, ctx) ? "true" : "false"},
      {"point_value", ctx.has_point_value() ? "true" : "false"},
      {"point_gradient", ctx.has_point_gradient() ? "true" : "false"},
  };
  Json out{{"n", a.n}, {"p", a.p}, {"m", a.m}};
  std::vector<std::vector<csv::Cell>> rows;
  for (const auto& [k, v] : kv) {
    rows.push_back({k, v});
    if (v == "true" || v == "false")
      out[k] = v == "true";
    else
      out[k] = v;
  }
  if (c.csv()) return {table("predicates", {"predicate", "value"}, rows), "csv"};
  return {dump(out), "json"};
}

struct SpectrumArgs {
  int n = 3;
  std::vector<std::string> beta;
  std::vector<double> radii;
};

Rendered spectrum(const SpectrumArgs& a, const Common& c) {
  std::vector<std::vector<csv::Cell>> rows, profile;
  Json list = Json::array();
  for (const auto& bs : a.beta) {
    const PointInteraction op(a.n, parse_ext(bs));
    const auto e = operators::eigenvalue(op);
    const auto cand = operators::spectral_candidates(op);
    const double lam = e ? e->lambda : NAN;
    auto opt = [](const std::optional<double>& v) { return v ? *v : NAN; };
    rows.push_back({std::int64_t{a.n}, ext_cell(op.beta), std::int64_t{e ? 1 : 0}, lam, opt(cand.closed_form),
                    opt(cand.abd_eight_pi), opt(cand.abd_boundary)});
    Json item{{"n", a.n}, {"beta", ext_json(op.beta)}, {"exists", e.has_value()}, {"lambda", num_json(lam)},
              {"abd_eight_pi", num_json(opt(cand.abd_eight_pi))}, {"abd_boundary", num_json(opt(cand.abd_boundary))}};
    if (e && !a.radii.empty()) {
      Json prof = Json::array();
      for (double r : a.radii) {
        const double v = e->e(Point::radial(a.n, r)).real();
        profile.push_back({std::int64_t{a.n}, ext_cell(op.beta), lam, r, v});
        prof.push_back({{"r", r}, {"value", num_json(v)}});
      }
      item["profile"] = prof;
    }
    list.push_back(item);
  }
  if (c.csv()) {
    if (!a.radii.empty()) return {table("eigenfunction", {"n", "beta", "lambda", "r", "value"}, profile), "csv"};
    return {table("spectrum", {"n", "beta", "exists", "lambda", "closed_form", "abd_eight_pi", "abd_boundary"}, rows), "csv"};
  }
  return {dump(Json{{"rows", list}}), "json"};
}

struct DictionaryArgs {
  std::vector<int> n{3};
  std::vector<std::string> beta, alpha;
};

Rendered dictionary(const DictionaryArgs& a, const Common& c) {
  const bool from_beta = !a.beta.empty();
  if (from_beta == !a.alpha.empty()) throw DomainError("give exactly one of --beta and --alpha");
  std::vector<std::vector<csv::Cell>> rows;
  Json list = Json::array();
  for (int n : a.n) {
    for (const auto& s : from_beta ? a.beta : a.alpha) {
      const ExtReal v = parse_ext(s);
      auto conv = [&](Dictionary d) {
        return from_beta ? operators::alpha_from_beta(n, v, d) : operators::beta_from_alpha(n, v, d);
      };
      const ExtReal eight_pi = conv(Dictionary::EightPi), boundary = conv(Dictionary::BoundaryCondition);
      rows.push_back({std::int64_t{n}, ext_cell(v), ext_cell(eight_pi), ext_cell(boundary)});
      list.push_back({{"n", n}, {from_beta ? "beta" : "alpha", ext_json(v)}, {"eight_pi", ext_json(eight_pi)}, {"boundary", ext_json(boundary)}});
    }
  }
  if (c.csv()) {
    if (from_beta) return {table("dictionary-from-beta", {"n", "beta", "alpha_eight_pi", "alpha_boundary"}, rows), "csv"};
    return {table("dictionary-from-alpha", {"n", "alpha", "beta_eight_pi", "beta_boundary"}, rows), "csv"};
  }
  return {dump(Json{{"from", from_beta ? "beta" : "alpha"}, {"rows", list}}), "json"};
}

operators::Source gaussian_source(double width) {
  if (!(width > 0.0)) throw DomainError("source width must be > 0");
  operators::Source s;
  s.radial = true;
  s.h = [width](const Point& x) {
    const double r = x.norm();
    return Complex(std::exp(-r * r / (width * width)));
  };
  // r^2 / w^2 >= r - w^2 / 4.
  s.decay = {1.0, std::exp(width * width / 4.0)};
  return s;
}

struct ResolventArgs {
  std::string beta;
  double lambda = 1.0, width = 1.0;
  std::vector<double> radii;
};

Rendered resolvent(const ResolventArgs& a, const Common& c) {
  const PointInteraction op(3, parse_ext(a.beta));
  const auto src = gaussian_source(a.width);
  const auto spec = c.spec();
  const Complex w0 = operators::free_resolvent_apply(a.lambda, src, Point{0.0, 0.0, 0.0}, spec);
  const Complex kappa = operators::resolvent_coefficient(op, a.lambda, w0);
  std::vector<std::vector<csv::Cell>> rows;
  Json out{{"beta", ext_json(op.beta)}, {"lambda", a.lambda}, {"width", a.width}, {"kappa", complex_json(kappa)}, {"rows", Json::array()}};
  for (double r : a.radii) {
    const Complex v = operators::resolvent_apply(op, a.lambda, src, Point{r, 0.0, 0.0}, spec);
    rows.push_back({r, v.real(), v.imag()});
    out["rows"].push_back({{"r", r}, {"value", complex_json(v)}});
  }
  if (c.csv()) return {table("resolvent", {"r", "re", "im"}, rows), "csv"};
  return {dump(out), "json"};
}

struct Side {
  std::vector<double> c0, f0, c, grad;
};

struct GreenArgs {
  int n = 3;
  double p = 2.0;
  Side u, v;
};

sobolev::SingularDecomposition side_decomposition(const Side& s, int n, double p, const std::string& name) {
  sobolev::SingularDecomposition d;
  d.ctx = sobolev::SpaceContext(n, p);
  d.c0 = complex_from(s.c0, name + "-c0");
  d.c.assign(static_cast<std::size_t>(n), 0.0);
  if (!s.c.empty()) {
    if (s.c.size() != static_cast<std::size_t>(n)) throw DomainError(name + "-c needs n values");
    for (int i = 0; i < n; ++i) d.c[i] = s.c[i];
  }
  if (!s.f0.empty()) d.f0 = complex_from(s.f0, name + "-f0");
  if (!s.grad.empty()) {
    if (s.grad.size() != static_cast<std::size_t>(n)) throw DomainError(name + "-grad needs n values");
    d.grad_f0 = std::vector<Complex>(s.grad.begin(), s.grad.end());
  }
  return d;
}

Rendered green(const GreenArgs& a, const Common& c) {
  const auto r = operators::green_form(side_decomposition(a.u, a.n, a.p, "u"), side_decomposition(a.v, a.n, a.p, "v"));
  if (c.csv()) return {table("green", {"case", "re", "im"}, std::vector<std::vector<csv::Cell>>{{r.case_label, r.value.real(), r.value.imag()}}), "csv"};
  return {dump(Json{{"case", r.case_label}, {"value", complex_json(r.value)}}), "json"};
}

struct HeatKernelArgs {
  std::string mode = "kernel", beta, dictionary = "eight-pi";
  std::vector<double> t, x, y;
  double angle = 0.0;
};

Rendered heat_kernel(const HeatKernelArgs& a, const Common& c) {
  const PointInteraction op(3, parse_ext(a.beta));
  const Dictionary dict = dictionary_from(a.dictionary);
  const auto spec = c.spec();
  const double th = a.angle * pi / 180.0;
  std::vector<std::vector<csv::Cell>> rows;
  Json out{{"mode", a.mode}, {"beta", ext_json(op.beta)}, {"rows", Json::array()}};
  if (a.mode == "kernel") {
    for (double t : a.t)
      for (double rx : a.x)
        for (double ry : a.y) {
          const Point x{rx, 0.0, 0.0}, y{ry * std::cos(th), ry * std::sin(th), 0.0};
          const auto v = heatkernel::heat_kernel_beta({t, x, y, op}, spec, dict);
          rows.push_back({t, rx, ry, v.value, v.error_estimate});
          out["rows"].push_back({{"t", t}, {"abs_x", rx}, {"abs_y", ry}, {"value", num_json(v.value)}, {"err", v.error_estimate}});
        }
    if (c.csv()) return {table("heat-kernel", {"t", "abs_x", "abs_y", "value", "err"}, rows), "csv"};
    return {dump(out), "json"};
  }
  // Boundary response with its two-sided envelope on [0, T], T the largest t.
  double T = 0.0;
  for (double t : a.t) T = std::max(T, t);
  const ExtReal alpha = operators::alpha_from_beta(3, op.beta, dict);
  const double cl = alpha.is_finite() ? heatkernel::c_lower_bound(alpha.value(), T, spec) : NAN;
  out["c_lower_bound"] = num_json(cl);
  out["T"] = T;
  for (double t : a.t)
    for (double ry : a.y) {
      const Point y{ry, 0.0, 0.0};
      const auto v = heatkernel::r_beta(t, y, op, spec, dict);
      const double upper = 8.0 * pi * t / ry * heatkernel::gaussian(t, ry), lower = cl * upper;
      const bool inside = v.value <= upper && v.value >= lower;
      rows.push_back({t, ry, v.value, v.error_estimate, lower, upper, std::int64_t{inside ? 1 : 0}});
      out["rows"].push_back({{"t", t}, {"abs_y", ry}, {"value", num_json(v.value)}, {"err", v.error_estimate},
                             {"lower", num_json(lower)}, {"upper", num_json(upper)}, {"inside", inside}});
    }
  if (c.csv()) return {table("r-beta", {"t", "abs_y", "value", "err", "lower", "upper", "inside"}, rows), "csv"};
  return {dump(out), "json"};
}

struct SimulateArgs {
  std::string beta, dictionary = "eight-pi";
  int n = 3;
  double T = 1.0, dt = 1e-2;
  std::vector<double> probe_radii{1.0};
  std::size_t paths = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::optional<double> u0_width;
};

Rendered simulate(const SimulateArgs& a, const Common& c) {
  spde::SimulationConfig cfg;
  cfg.op = PointInteraction(a.n, parse_ext(a.beta));
  cfg.T = a.T;
  cfg.dt = a.dt;
  for (double r : a.probe_radii) cfg.points.push_back(Point::radial(a.n, r));
  cfg.n_paths = a.paths;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.dict = dictionary_from(a.dictionary);
  cfg.spec = c.spec();
  if (a.u0_width) cfg.u0 = gaussian_source(*a.u0_width);
  const auto e = spde::simulate(cfg);

  if (c.csv()) {
    std::ostringstream os;
    csv::Writer w(os, "ensemble", {"path", "t", "probe_index", "value"});
    for (std::size_t p = 0; p < e.n_paths; ++p)
      for (std::size_t k = 0; k < e.times.size(); ++k)
        for (std::size_t i = 0; i < e.probes.size(); ++i)
          w.row({static_cast<std::int64_t>(p), e.times[k], static_cast<std::int64_t>(i), e.sample(p, k, i)});
    return {os.str(), "csv"};
  }

  Json out{{"n", a.n}, {"beta", ext_json(cfg.op.beta)}, {"T", a.T}, {"dt", a.dt}, {"paths", a.paths}, {"seed", a.seed},
           {"warnings", e.warnings}, {"probes", Json::array()}};
  const std::size_t last = e.times.size() - 1;
  for (std::size_t i = 0; i < e.probes.size(); ++i) {
    std::vector<double> col(e.n_paths);
    for (std::size_t p = 0; p < e.n_paths; ++p) col[p] = e.sample(p, last, i);
    const auto m = spde::sample_moments(col);
    const double oracle = spde::variance_oracle(cfg.op, a.T, e.probes[i], cfg.spec, cfg.dict);
    const double mean_oracle = cfg.u0 ? heatkernel::semigroup_apply(cfg.op, a.T, *cfg.u0, e.probes[i], cfg.spec, cfg.dict) : 0.0;
    Json series = Json::array();
    for (std::size_t k = 0; k < e.times.size(); ++k) {
      const double t = e.times[k];
      series.push_back({{"t", t},
                        {"mean", e.mean_at(k, i)},
                        {"variance", e.variance_at(k, i)},
                        {"oracle", k == 0 ? 0.0 : spde::variance_oracle(cfg.op, t, e.probes[i], cfg.spec, cfg.dict)}});
    }
    out["probes"].push_back({{"index", i},
                             {"radius", a.probe_radii[i]},
                             {"mean", m.mean},
                             {"mean_oracle", mean_oracle},
                             {"mean_z", num_json((m.mean - mean_oracle) / m.mean_stderr())},
                             {"variance", m.variance},
                             {"variance_oracle", oracle},
                             {"variance_stderr", m.variance_stderr()},
                             {"variance_z", num_json((m.variance - oracle) / m.variance_stderr())},
                             {"skewness", m.skewness},
                             {"excess_kurtosis", m.excess_kurtosis},
                             {"series", series}});
  }
  return {dump(out), "json"};
}

struct WellposednessArgs {
  std::string kind;
  int n = 3;
  std::vector<double> p, l;
  double t = 1.0;
};

Rendered wellposedness(const WellposednessArgs& a, const Common& c) {
  const auto spec = c.spec();
  const bool uses_l = a.kind == "hl" || a.kind == "invariant";
  const auto& grid = uses_l ? a.l : a.p;
  if (grid.empty()) throw DomainError(std::string("--kind ") + a.kind + " needs " + (uses_l ? "--l" : "--p"));
  std::vector<std::vector<csv::Cell>> rows;
  Json out{{"kind", a.kind}, {"n", a.n}, {"rows", Json::array()}};
  for (double v : grid) {
    bool finite = false;
    spde::Estimate est;
    std::string note;
    if (a.kind == "beta0") {
      auto r = spde::wellposed_beta0(sobolev::SpaceContext(a.n, v), a.t, spec);
      finite = r.finite, est = r.estimate, note = r.threshold_note;
    } else if (a.kind == "beta") {
      auto r = spde::wellposed_beta_nonzero(v, spec);
      finite = r.finite, est = r.estimate, note = r.threshold_note;
    } else if (a.kind == "hl") {
      finite = spde::hl_wellposed_beta_nonzero(v);
      est = spde::hl_time_integral(v, a.t, spec);
    } else {
      auto r = spde::invariant_measure_exists(a.n, v, spec);
      finite = r.exists, est = r.diagnostic;
    }
    rows.push_back({a.kind, std::int64_t{a.n}, v, std::int64_t{finite ? 1 : 0}, est.value, est.error_estimate,
                    std::int64_t{est.diverged ? 1 : 0}, note});
    Json item{{uses_l ? "l" : "p", v}, {"finite", finite}, {"estimate", est.diverged ? Json(nullptr) : num_json(est.value)},
              {"error_estimate", num_json(est.error_estimate)}, {"diverged", est.diverged}};
    if (!note.empty()) item["note"] = note;
    out["rows"].push_back(item);
  }
  if (c.csv())
    return {table("wellposedness", {"kind", "n", "param", "finite", "estimate", "error_estimate", "diverged", "note"}, rows), "csv"};
  return {dump(out), "json"};
}

void write(const Rendered& r, const Common& c, const std::string& subcommand, std::ostream& out) {
  std::string path = c.output;
  if (path.empty()) {
    const char* dir = std::getenv(output_dir_env);
    if (dir == nullptr || *dir == '\0') {
      out << r.text;
      return;
    }
    std::filesystem::create_directories(dir);
    path = (std::filesystem::path(dir) / (subcommand + "." + r.extension)).string();
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open output file " + path);
  f << r.text;
  if (!f) throw DomainError("failed writing " + path);
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Laplacians with a point interaction: kernels, decompositions, heat kernel and boundary-noise SPDE"};
  app.name("puncture");
  app.require_subcommand(1, 1);

  std::map<std::string, Common> common;
  std::map<std::string, std::function<Rendered(const Common&)>> handlers;
  auto sub = [&](const std::string& name, const std::string& help, const std::string& default_format) {
    auto* s = app.add_subcommand(name, help);
    add_common(s, common[name], default_format);
    return s;
  };

  EvalKernelArgs ek;
  auto* s = sub("eval-kernel", "G_n, K_nu, P or |grad G_n| on a radius grid", "csv");
  s->add_option("--fn", ek.fn)->check(CLI::IsMember({"G", "K", "P", "gradG"}))->capture_default_str();
  s->add_option("--n", ek.n)->capture_default_str();
  s->add_option("--nu", ek.nu, "Order of K_nu")->capture_default_str();
  s->add_option("--t", ek.t, "Time for P")->capture_default_str();
  s->add_option("--lambda", ek.lambda, "Scale of G_{n,lambda}")->capture_default_str();
  s->add_option("--radii", ek.radii)->required();
  handlers["eval-kernel"] = [&](const Common& c) { return eval_kernel(ek, c); };

  ClassifyArgs cl;
  s = sub("classify", "Representation case for (n, p)", "json");
  s->add_option("--n", cl.n)->required();
  s->add_option("--p", cl.p)->required();
  handlers["classify"] = [&](const Common& c) { return classify(cl, c); };

  DecomposeArgs dc;
  s = sub("decompose", "Singular/regular coefficients from 1-D boundary data or by limit extraction", "json");
  s->add_option("--mode", dc.mode)->check(CLI::IsMember({"1d", "limit"}))->capture_default_str();
  s->add_option("--u-plus", dc.u_plus);
  s->add_option("--u-minus", dc.u_minus);
  s->add_option("--du-plus", dc.du_plus);
  s->add_option("--du-minus", dc.du_minus);
  s->add_option("--p", dc.p)->capture_default_str();
  s->add_option("--n", dc.n, "limit mode: u = amplitude G_{n,lambda} + offset exp(-|x|^2)")->capture_default_str();
  s->add_option("--lambda", dc.lambda)->capture_default_str();
  s->add_option("--amplitude", dc.amplitude)->capture_default_str();
  s->add_option("--offset", dc.offset)->capture_default_str();
  handlers["decompose"] = [&](const Common& c) { return decompose(dc, c); };

  PredicateArgs pr;
  s = sub("predicates", "Polar set, density, uniqueness and zero-trace predicates", "json");
  s->add_option("--n", pr.n)->required();
  s->add_option("--p", pr.p)->required();
  s->add_option("--m", pr.m, "Sobolev order for the polar-set test")->capture_default_str();
  handlers["predicates"] = [&](const Common& c) { return predicates(pr, c); };

  SpectrumArgs sp;
  s = sub("spectrum", "Negative eigenvalue of A_beta and its eigenfunction", "csv");
  s->add_option("--n", sp.n)->capture_default_str();
  s->add_option("--beta", sp.beta, "Values of beta (a number or inf)")->required();
  s->add_option("--radii", sp.radii, "Eigenfunction profile radii");
  handlers["spectrum"] = [&](const Common& c) { return spectrum(sp, c); };

  DictionaryArgs dic;
  s = sub("dictionary", "alpha <-> beta under both dictionaries", "csv");
  s->add_option("--n", dic.n)->capture_default_str();
  s->add_option("--beta", dic.beta);
  s->add_option("--alpha", dic.alpha);
  handlers["dictionary"] = [&](const Common& c) { return dictionary(dic, c); };

  ResolventArgs rs;
  s = sub("resolvent", "(lambda + A_beta)^{-1} applied to exp(-|x|^2 / width^2), n = 3", "csv");
  s->add_option("--beta", rs.beta)->required();
  s->add_option("--lambda", rs.lambda)->capture_default_str();
  s->add_option("--width", rs.width)->capture_default_str();
  s->add_option("--radii", rs.radii)->required();
  handlers["resolvent"] = [&](const Common& c) { return resolvent(rs, c); };

  GreenArgs gr;
  s = sub("green", "Green form E(u, v) of two decompositions", "json");
  s->add_option("--n", gr.n)->required();
  s->add_option("--p", gr.p)->capture_default_str();
  for (auto [side, name] : {std::pair{&gr.u, std::string("u")}, std::pair{&gr.v, std::string("v")}}) {
    s->add_option("--" + name + "-c0", side->c0, "re [im]")->expected(1, 2);
    s->add_option("--" + name + "-f0", side->f0, "re [im]")->expected(1, 2);
    s->add_option("--" + name + "-c", side->c, "n derivative coefficients");
    s->add_option("--" + name + "-grad", side->grad, "n gradient components of f at 0");
  }
  handlers["green"] = [&](const Common& c) { return green(gr, c); };

  HeatKernelArgs hk;
  s = sub("heat-kernel", "Heat kernel of A_beta or R_beta with its envelope, n = 3", "csv");
  s->add_option("--mode", hk.mode)->check(CLI::IsMember({"kernel", "r-beta"}))->capture_default_str();
  s->add_option("--beta", hk.beta)->required();
  s->add_option("--dictionary", hk.dictionary)->check(CLI::IsMember({"eight-pi", "boundary"}))->capture_default_str();
  s->add_option("--t", hk.t)->required();
  s->add_option("--x", hk.x, "|x| values (kernel mode)");
  s->add_option("--y", hk.y)->required();
  s->add_option("--angle", hk.angle, "Angle between x and y in degrees")->capture_default_str();
  handlers["heat-kernel"] = [&](const Common& c) {
    if (hk.mode == "kernel" && hk.x.empty()) throw DomainError("kernel mode needs --x");
    return heat_kernel(hk, c);
  };

  SimulateArgs sim;
  s = sub("simulate", "Monte Carlo ensemble of the boundary-noise heat equation", "json");
  s->add_option("--beta", sim.beta)->required();
  s->add_option("--n", sim.n)->capture_default_str();
  s->add_option("--dictionary", sim.dictionary)->check(CLI::IsMember({"eight-pi", "boundary"}))->capture_default_str();
  s->add_option("--T", sim.T)->capture_default_str();
  s->add_option("--dt", sim.dt)->capture_default_str();
  s->add_option("--probe-radii", sim.probe_radii)->capture_default_str();
  s->add_option("--paths", sim.paths)->capture_default_str();
  s->add_option("--seed", sim.seed)->capture_default_str();
  s->add_option("--threads", sim.threads, "0: hardware concurrency; results do not depend on it")->capture_default_str();
  s->add_option("--u0-width", sim.u0_width, "Gaussian initial condition exp(-|x|^2 / w^2)");
  handlers["simulate"] = [&](const Common& c) { return simulate(sim, c); };

  WellposednessArgs wp;
  s = sub("wellposedness", "Finiteness of the I, J and H^{-l} integrals and invariant measures", "csv");
  s->add_option("--kind", wp.kind)->check(CLI::IsMember({"beta0", "beta", "hl", "invariant"}))->required();
  s->add_option("--n", wp.n)->capture_default_str();
  s->add_option("--p", wp.p);
  s->add_option("--l", wp.l);
  s->add_option("--t", wp.t)->capture_default_str();
  handlers["wellposedness"] = [&](const Common& c) { return wellposedness(wp, c); };

  std::string only;
  auto* st = app.add_subcommand("selftest", "Run the acceptance suite");
  st->add_option("--only", only, "Run criteria whose id contains this substring");

  try {
    const auto merged = merge_config(raw_args);
    std::vector<std::string> reversed(merged.rbegin(), merged.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return exit_ok;
    const auto used = app.get_subcommands();
    err << (used.empty() ? app.help() : used.front()->help());
    return exit_usage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return exit_domain_error;
  }

  try {
    if (st->parsed()) return selftest::run(out, only).ok() ? exit_ok : exit_domain_error;
    for (auto& [name, handler] : handlers) {
      if (!app.get_subcommand(name)->parsed()) continue;
      const Common& c = common.at(name);
      write(handler(c), c, name, out);
    }
    return exit_ok;
  } catch (const NonConvergence& e) {
    err << "non-convergence: " << e.what() << '\n';
    return exit_non_convergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_domain_error;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace puncture::cli
