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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fbe/errors.hpp"
#include "fbe/ifs.hpp"
#include "fbe/random.hpp"
#include "fbe/symbolic.hpp"

namespace fbe {

inline constexpr int kCodingIterationCap = 20000;

namespace detail {

// Limit of f_u(f_p^m(b)) as m grows.
inline Point tail_limit(const IfsSystem& ifs, const Word& u, const Word& p, Point b, double tol) {
  const Space s = ifs.space();
  Point y = b;
  Point prev = ifs.apply_word(u, y);
  double last = -1.0;
  for (int m = 1; m <= kCodingIterationCap; ++m) {
    y = ifs.apply_word(p, y);
    const Point z = ifs.apply_word(u, y);
    const double delta = distance(s, z, prev);
    prev = z;
    // below rounding noise; also covers the worst clamped ratio
    if (delta < tol * 1e-3) return z;
    // stuck at the rounding floor of z itself
    const double scale = s == Space::Sphere || z.infinite ? 1.0 : 1.0 + std::hypot(z.x, z.y);
    if (delta <= 16.0 * std::numeric_limits<double>::epsilon() * scale) return z;
    if (last > 0.0 && delta < tol) {
      const double rho = std::min(0.999, delta / last);
      if (delta * rho / (1.0 - rho) < tol) return z;
    }
    last = delta;
  }
  throw Error(ErrorCode::NoConvergence, "coding map did not converge", last);
}

}  // namespace detail

// pi on addresses with an eventually positive tail: the finite prefix up to
// the last negative digit is applied to the limit point of the tail.
inline Point coding_map(const IfsSystem& ifs, const Address& addr, double tol = 1e-14) {
  const AddressClass cls = validate(addr, ifs.size());
  if (!cls.in_Jplus) throw Error(ErrorCode::Domain, to_string(addr) + " does not have a positive tail");
  const Word& pre = addr.preperiod();
  std::size_t K = 0;
  for (std::size_t i = 0; i < pre.size(); ++i)
    if (pre[i] < 0) K = i + 1;
  const Word head(pre.begin(), pre.begin() + static_cast<std::ptrdiff_t>(K));
  const Word u(pre.begin() + static_cast<std::ptrdiff_t>(K), pre.end());
  const Word& p = addr.period();

  const std::vector<Point> seeds = ifs.default_seed();
  Point b1 = seeds.front(), b2 = seeds.back();
  if (b1 == b2) b2 = Point{b1.x + 1.0, b1.y, false};
  const Point z1 = detail::tail_limit(ifs, u, p, b1, tol);
  const Point z2 = detail::tail_limit(ifs, u, p, b2, tol);
  const double gap = distance(ifs.space(), z1, z2);
  if (gap > 2.0 * tol) throw Error(ErrorCode::NoConvergence, "coding map depends on the base point", gap);
  return ifs.apply_word(head, z1);
}

struct SemiconjugacyCheck {
  Address iota;
  int n = 0;
  double residual = 0.0;
};

struct SemiconjugacyReport {
  std::size_t checks = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::vector<SemiconjugacyCheck> failures;

  bool passed() const { return failures.empty(); }
};

// d(pi(sigma_n(iota)), f_n(pi(iota))) over random addresses with positive
// tails and every digit n, both signs.
inline SemiconjugacyReport verify_semiconjugacy(const IfsSystem& ifs, int n_samples, double tol,
                                                std::uint64_t seed = 1, AddressKind kind = AddressKind::PositiveTail) {
  Rng rng(seed);
  SemiconjugacyReport rep;
  rep.tolerance = tol;
  const double ctol = std::min(1e-13, tol * 1e-3);
  for (int s = 0; s < n_samples; ++s) {
    const Address iota = random_address(rng, ifs.size(), kind);
    const Point x = coding_map(ifs, iota, ctol);
    for (int n = -ifs.size(); n <= ifs.size(); ++n) {
      if (n == 0) continue;
      const Address moved = sigma(n, iota);
      if (!validate(moved, ifs.size()).in_Jplus) continue;
      const double r = distance(ifs.space(), coding_map(ifs, moved, ctol), ifs.apply(n, x));
      ++rep.checks;
      rep.max_residual = std::max(rep.max_residual, r);
      if (!(r <= tol)) rep.failures.push_back({iota, n, r});
    }
  }
  return rep;
}

}  // namespace fbe
