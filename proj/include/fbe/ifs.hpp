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

#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fbe/errors.hpp"
#include "fbe/geometry.hpp"
#include "fbe/maps.hpp"

namespace fbe {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string_view to_string(Space s) {
  switch (s) {
    case Space::R1: return "R1";
    case Space::R2: return "R2";
    case Space::Sphere: return "sphere";
  }
  return "?";
}

class IfsSystem {
 public:
  IfsSystem(Space space, std::vector<MapSpec> maps, std::optional<double> contractivity = std::nullopt)
      : space_(space), maps_(std::move(maps)), contractivity_(contractivity) {
    if (maps_.empty()) throw Error(ErrorCode::Domain, "an IFS needs at least one map");
    for (std::size_t i = 0; i < maps_.size(); ++i) {
      const std::string where = "map " + std::to_string(i + 1);
      if (auto* g = std::get_if<AffineMap>(&maps_[i])) {
        if (space_ == Space::Sphere) throw Error(ErrorCode::Domain, where + ": affine map on the sphere");
        if (g->dim != embed_dim(space_)) throw Error(ErrorCode::Domain, where + ": dimension mismatch");
        const double D = g->det();
        if (D == 0.0 || !std::isfinite(D)) throw Error(ErrorCode::NonInvertible, where + " is not invertible");
      } else {
        if (space_ != Space::Sphere) throw Error(ErrorCode::Domain, where + ": Moebius map needs the sphere");
        auto& m = std::get<MoebiusMap>(maps_[i]);
        if (m.det() == Complex(0.0)) throw Error(ErrorCode::NonInvertible, where + " is not invertible");
        m = m.normalized();
      }
      inverses_.push_back(inverse(maps_[i]));
    }
  }

  Space space() const noexcept { return space_; }
  int size() const noexcept { return static_cast<int>(maps_.size()); }
  const std::vector<MapSpec>& maps() const noexcept { return maps_; }
  std::optional<double> contractivity() const noexcept { return contractivity_; }

  // f_n for n > 0, the inverse of f_{-n} for n < 0
  const MapSpec& map(int digit) const {
    if (digit == 0 || std::abs(digit) > size())
      throw Error(ErrorCode::InvalidDigit, "digit " + std::to_string(digit) + " for " + std::to_string(size()) + " maps");
    return digit > 0 ? maps_[digit - 1] : inverses_[-digit - 1];
  }

  Point apply(int digit, const Point& p) const { return fbe::apply(map(digit), p); }

  // f_{w1} o f_{w2} o ... o f_{wk}(x): the last digit acts first
  Point apply_word(std::span<const int> w, Point p) const {
    for (std::size_t i = w.size(); i-- > 0;) p = apply(w[i], p);
    return p;
  }

  IfsSystem dual() const { return IfsSystem(space_, inverses_, std::nullopt); }

  // Max global Lipschitz constant over the maps.
  double lipschitz() const {
    double l = 0.0;
    for (const auto& f : maps_) l = std::max(l, global_lipschitz(f));
    return l;
  }

  std::vector<Point> default_seed() const {
    std::vector<Point> s;
    for (const auto& f : maps_) s.push_back(attracting_fixed_point(f));
    return s;
  }

  std::string canonical_text() const {
    std::string s = std::string(to_string(space_)) + "\n";
    for (const auto& f : maps_) {
      if (const auto* g = std::get_if<AffineMap>(&f)) {
        s += "affine";
        const int n = g->dim * g->dim;
        for (int i = 0; i < 4; ++i)
          if (g->dim == 2 || i < n) s += " " + format_double(g->m[i]);
        for (int i = 0; i < g->dim; ++i) s += " " + format_double(g->t[i]);
      } else {
        const auto& m = std::get<MoebiusMap>(f);
        s += "moebius";
        for (Complex z : {m.a, m.b, m.c, m.d}) s += " " + format_double(z.real()) + " " + format_double(z.imag());
      }
      s += "\n";
    }
    return s;
  }

  // FNV-1a 64 of the canonical text, 16 hex digits
  std::string hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical_text()) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

 private:
  Space space_;
  std::vector<MapSpec> maps_;
  std::vector<MapSpec> inverses_;
  std::optional<double> contractivity_;
};

struct LipschitzBound {
  double value = 0.0;
  bool estimate = false;  // sampled, not proven
};

// index is 1-based. Affine maps get the exact operator norm; Moebius maps a
// sampled sup of the chordal derivative over the region.
inline LipschitzBound lipschitz_bound(const IfsSystem& ifs, int index, const Box& region) {
  const MapSpec& f = ifs.map(index);
  if (const auto* g = std::get_if<AffineMap>(&f)) return {g->operator_norm(), false};
  const auto& m = std::get<MoebiusMap>(f);
  if (m.c != Complex(0.0)) {
    const Complex pole = -m.d / m.c;
    if (region.contains(Point{pole.real(), pole.imag()}))
      throw Error(ErrorCode::UnboundedDerivative, "region contains the pole of map " + std::to_string(index));
  }
  constexpr int kSamples = 64;
  double best = 0.0;
  for (int i = 0; i <= kSamples; ++i)
    for (int j = 0; j <= kSamples; ++j) {
      const Point p{region.x0 + (region.x1 - region.x0) * i / kSamples,
                    region.y0 + (region.y1 - region.y0) * j / kSamples};
      best = std::max(best, m.chordal_derivative(p));
    }
  return {best, true};
}

}  // namespace fbe
