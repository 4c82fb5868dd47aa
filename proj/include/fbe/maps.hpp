// Copyright 2026 The fbe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <variant>

#include "fbe/errors.hpp"
#include "fbe/geometry.hpp"

namespace fbe {

using Complex = std::complex<double>;

// x -> M x + t on R^1 (only m[0], t[0] used) or R^2, M row-major.
struct AffineMap {
  int dim = 1;
  std::array<double, 4> m{1.0, 0.0, 0.0, 1.0};
  std::array<double, 2> t{0.0, 0.0};

  static AffineMap scalar(double a, double b) { return AffineMap{1, {a, 0.0, 0.0, 1.0}, {b, 0.0}}; }
  static AffineMap planar(double a, double b, double c, double d, double e, double f) {
    return AffineMap{2, {a, b, c, d}, {e, f}};
  }

  Point apply(const Point& p) const {
    if (dim == 1) return Point{m[0] * p.x + t[0], 0.0};
    return Point{m[0] * p.x + m[1] * p.y + t[0], m[2] * p.x + m[3] * p.y + t[1]};
  }

  double det() const { return dim == 1 ? m[0] : m[0] * m[3] - m[1] * m[2]; }

  AffineMap inverse() const {
    const double D = det();
    if (D == 0.0 || !std::isfinite(D)) throw Error(ErrorCode::NonInvertible, "singular affine map");
    if (dim == 1) return scalar(1.0 / m[0], -t[0] / m[0]);
    const double a = m[3] / D, b = -m[1] / D, c = -m[2] / D, d = m[0] / D;
    return planar(a, b, c, d, -(a * t[0] + b * t[1]), -(c * t[0] + d * t[1]));
  }

  // largest singular value
  double operator_norm() const {
    if (dim == 1) return std::abs(m[0]);
    const double s = m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3];
    const double D = det();
    const double disc = std::max(0.0, s * s - 4.0 * D * D);
    return std::sqrt((s + std::sqrt(disc)) / 2.0);
  }

  bool operator==(const AffineMap&) const = default;
};

// z -> (a z + b) / (c z + d) on the Riemann sphere.
struct MoebiusMap {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

  Complex det() const { return a * d - b * c; }

  // scaled so that ad - bc = 1 (principal square root)
  MoebiusMap normalized() const {
    const Complex D = det();
    if (D == Complex(0.0)) throw Error(ErrorCode::NonInvertible, "degenerate Moebius map");
    const Complex s = std::sqrt(D);
    return MoebiusMap{a / s, b / s, c / s, d / s};
  }

  MoebiusMap inverse() const { return MoebiusMap{d, -b, -c, a}; }

  Point apply(const Point& p) const {
    if (p.infinite) {
      if (c == Complex(0.0)) return infinity();
      const Complex w = a / c;
      return Point{w.real(), w.imag()};
    }
    const Complex z(p.x, p.y);
    const Complex den = c * z + d;
    if (den == Complex(0.0)) return infinity();
    const Complex w = (a * z + b) / den;
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return infinity();
    return Point{w.real(), w.imag()};
  }

  // chordal derivative of the normalized map at p
  double chordal_derivative(const Point& p) const {
    if (p.infinite) return 1.0 / (std::norm(a) + std::norm(c));
    const Complex z(p.x, p.y);
    return (1.0 + std::norm(z)) / (std::norm(a * z + b) + std::norm(c * z + d));
  }

  // sup of the chordal derivative over the sphere (normalized map)
  double global_lipschitz() const {
    const double s = std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
    return (s + std::sqrt(std::max(0.0, s * s - 4.0))) / 2.0;
  }

  bool operator==(const MoebiusMap&) const = default;
};

using MapSpec = std::variant<AffineMap, MoebiusMap>;

inline Point apply(const MapSpec& f, const Point& p) {
  return std::visit([&](const auto& g) { return g.apply(p); }, f);
}

inline MapSpec inverse(const MapSpec& f) {
  return std::visit([](const auto& g) -> MapSpec { return g.inverse(); }, f);
}

// Global Lipschitz constant: operator norm for affine maps, sup of the
// chordal derivative for Moebius maps.
inline double global_lipschitz(const MapSpec& f) {
  if (const auto* g = std::get_if<AffineMap>(&f)) return g->operator_norm();
  return std::get<MoebiusMap>(f).global_lipschitz();
}

inline Point attracting_fixed_point(const MapSpec& f) {
  if (const auto* g = std::get_if<AffineMap>(&f)) {
    // (I - M) x = t
    if (g->dim == 1) {
      if (g->m[0] == 1.0) throw Error(ErrorCode::Domain, "translation has no fixed point");
      return Point{g->t[0] / (1.0 - g->m[0]), 0.0};
    }
    const double a = 1.0 - g->m[0], b = -g->m[1], c = -g->m[2], d = 1.0 - g->m[3];
    const double D = a * d - b * c;
    if (D == 0.0) throw Error(ErrorCode::Domain, "affine map without isolated fixed point");
    return Point{(d * g->t[0] - b * g->t[1]) / D, (-c * g->t[0] + a * g->t[1]) / D};
  }
  const MoebiusMap& m = std::get<MoebiusMap>(f);
  if (m.c == Complex(0.0)) {
    // z -> (a z + b)/d: finite fixed point b/(d-a) attracts iff |a/d| < 1
    if (std::abs(m.a) < std::abs(m.d)) {
      const Complex z = m.b / (m.d - m.a);
      return Point{z.real(), z.imag()};
    }
    return infinity();
  }
  // c z^2 + (d - a) z - b = 0
  const Complex disc = std::sqrt((m.d - m.a) * (m.d - m.a) + 4.0 * m.b * m.c);
  const Complex z1 = (m.a - m.d + disc) / (2.0 * m.c);
  const Complex z2 = (m.a - m.d - disc) / (2.0 * m.c);
  // multiplier 1/(c z + d)^2 for normalized maps
  const auto mult = [&](Complex z) { return std::abs(m.c * z + m.d); };
  const Complex z = mult(z1) > mult(z2) ? z1 : z2;
  return Point{z.real(), z.imag()};
}

}  // namespace fbe
