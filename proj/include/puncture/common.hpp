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

#include <cmath>
#include <complex>
#include <initializer_list>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace puncture {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

// Exit-code classes used by the CLI: DomainError-like failures map to 1,
// NonConvergence to 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

class ContractViolation : public DomainError {
 public:
  using DomainError::DomainError;
};

class Unsupported : public DomainError {
 public:
  using DomainError::DomainError;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, double abscissa)
      : Error(what), abscissa_(abscissa) {}
  double abscissa() const { return abscissa_; }

 private:
  double abscissa_;
};

struct Point {
  std::vector<double> coords;

  Point() = default;
  explicit Point(std::vector<double> c) : coords(std::move(c)) {}
  Point(std::initializer_list<double> c) : coords(c) {}

  // Point at distance r along the first axis of R^n.
  static Point radial(int n, double r) {
    Point p;
    p.coords.assign(static_cast<std::size_t>(n), 0.0);
    p.coords[0] = r;
    return p;
  }

  int dim() const { return static_cast<int>(coords.size()); }

  double norm() const {
    double s = 0.0;
    for (double c : coords) s += c * c;
    return std::sqrt(s);
  }
};

inline Point operator-(const Point& a, const Point& b) {
  Point r = a;
  for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] -= b.coords[i];
  return r;
}

// Real or complex number extended by a single unsigned infinity.
template <typename T>
class Extended {
 public:
  Extended() = default;
  Extended(T v) : value_(v) {}

  static Extended infinity() {
    Extended e;
    e.inf_ = true;
    return e;
  }

  bool is_infinite() const { return inf_; }
  bool is_finite() const { return !inf_; }
  T value() const {
    if (inf_) throw DomainError("extended value is infinite");
    return value_;
  }

  bool operator==(const Extended& o) const {
    return inf_ == o.inf_ && (inf_ || value_ == o.value_);
  }

 private:
  T value_{};
  bool inf_ = false;
};

using ExtReal = Extended<double>;
using ExtComplex = Extended<Complex>;

// Surface area of the unit sphere S^{n-1} in R^n.
inline double sphere_area(int n) {
  return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace puncture
