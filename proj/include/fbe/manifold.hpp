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
#include <string>
#include <vector>

#include "fbe/attractor.hpp"
#include "fbe/coding.hpp"
#include "fbe/errors.hpp"
#include "fbe/ifs.hpp"
#include "fbe/parallel.hpp"
#include "fbe/symbolic.hpp"

namespace fbe {

// Representative (integer part, fractional part) of a point of the branched
// manifold. theta has negative digits only, x lies on the attractor and
// proj = f_theta(x).
struct ManifoldPoint {
  Word theta;
  Point x;
  Point proj;
};

struct ManifoldDistance {
  double d_L = 0.0;
  double d_X = 0.0;
  Word common_prefix;
  double error_bound = 0.0;
};

struct BranchPoint {
  ManifoldPoint point;
  int incident_leaves = 0;
};

inline Word common_prefix(const ManifoldPoint& a, const ManifoldPoint& b) {
  const auto [ia, ib] = std::mismatch(a.theta.begin(), a.theta.end(), b.theta.begin(), b.theta.end());
  return Word(a.theta.begin(), ia);
}

// Words over the negative digits with length <= depth, ordered by length then
// by digit magnitude.
inline std::vector<Word> enumerate_leaves(int n_maps, int depth) {
  std::vector<Word> out{Word{}};
  std::size_t begin = 0;
  for (int len = 1; len <= depth; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (int d = 1; d <= n_maps; ++d) {
        Word w = out[i];
        w.push_back(-d);
        out.push_back(std::move(w));
      }
    begin = end;
  }
  return out;
}

inline bool is_prefix(const Word& p, const Word& w) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

class Manifold {
 public:
  Manifold(IfsSystem ifs, AttractorCloud cloud) : ifs_(std::move(ifs)), cloud_(std::move(cloud)) {
    for (int i = 1; i <= ifs_.size(); ++i) {
      std::vector<Point> img(cloud_.points.size());
      for (std::size_t k = 0; k < img.size(); ++k) img[k] = ifs_.apply(i, cloud_.points[k]);
      images_.emplace_back(ifs_.space(), img);
    }
  }

  const IfsSystem& ifs() const noexcept { return ifs_; }
  const AttractorCloud& cloud() const noexcept { return cloud_; }
  double tau() const noexcept { return cloud_.tau(); }

  // distance from x to f_i(cloud), i > 0
  double distance_to_image(int i, const Point& x) const {
    return images_.at(static_cast<std::size_t>(i - 1)).nearest_distance(embed(ifs_.space(), x));
  }
  bool near_image(int i, const Point& x, double r) const {
    return images_.at(static_cast<std::size_t>(i - 1)).any_within(embed(ifs_.space(), x), r);
  }

  // Validated point; throws Domain when x is off the attractor or violates
  // the leaf condition x not in f_{i}(A) for theta ending in -i.
  ManifoldPoint make_point(Word theta, const Point& x) const {
    check_digits(theta, ifs_.size());
    for (int d : theta)
      if (d >= 0) throw Error(ErrorCode::Domain, "integer part must use negative digits");
    if (!cloud_.within(x, tau())) throw Error(ErrorCode::Domain, "fractional part is not on the attractor");
    if (!theta.empty() && near_image(-theta.back(), x, tau()))
      throw Error(ErrorCode::Domain, "point belongs to a shorter leaf");
    ManifoldPoint p{std::move(theta), x, {}};
    p.proj = ifs_.apply_word(p.theta, x);
    return p;
  }

  // Least k with pi(S^k(addr)) on the attractor. Values in the (tol, 2 tol)
  // band are refused rather than rounded.
  ManifoldPoint canonicalize(const Address& addr, double tol) const {
    const AddressClass c = validate(addr, ifs_.size());
    if (!c.in_Ihat) throw Error(ErrorCode::Domain, to_string(addr) + " is not negatives followed by positives");
    std::size_t m = 0;
    while (addr.digit(m) < 0) ++m;
    Address tail = addr;
    for (std::size_t k = 0; k <= m; ++k) {
      const Point x = coding_map(ifs_, tail);
      const double d = cloud_.distance_to(x);
      if (d <= tol) {
        ManifoldPoint p{addr.prefix(k), x, {}};
        p.proj = ifs_.apply_word(p.theta, x);
        return p;
      }
      if (d < 2.0 * tol)
        throw Error(ErrorCode::AmbiguousMembership,
                    "pi(S^" + std::to_string(k) + ") is " + format_double(d) + " from the attractor");
      if (k < m) tail = shift(tail);
    }
    throw Error(ErrorCode::Domain, "positive tail of " + to_string(addr) + " is off the attractor");
  }

  bool equal(const ManifoldPoint& a, const ManifoldPoint& b) const {
    return a.theta == b.theta && fbe::distance(ifs_.space(), a.x, b.x) <= tau();
  }

  // Lipschitz constant of f_w as a product of global bounds
  double word_lipschitz(const Word& w) const {
    double l = 1.0;
    for (int d : w) l *= global_lipschitz(ifs_.map(d));
    return l;
  }

  ManifoldDistance distance(const ManifoldPoint& a, const ManifoldPoint& b) const {
    ManifoldDistance r;
    const Space s = ifs_.space();
    r.common_prefix = common_prefix(a, b);
    r.d_X = fbe::distance(s, a.proj, b.proj);
    double best = std::numeric_limits<double>::infinity();
    for (const Point& c : cloud_.points) {
      const Point x = ifs_.apply_word(r.common_prefix, c);
      best = std::min(best, fbe::distance(s, a.proj, x) + fbe::distance(s, x, b.proj));
    }
    r.d_L = best;
    r.error_bound = 2.0 * word_lipschitz(r.common_prefix) * cloud_.epsilon;
    return r;
  }

  ManifoldPoint sigma_tilde(int n, const ManifoldPoint& a) const {
    if (n == 0 || std::abs(n) > ifs_.size()) throw Error(ErrorCode::InvalidDigit, "digit " + std::to_string(n));
    const Point proj = ifs_.apply(n, a.proj);
    if (n < 0) {
      if (!a.theta.empty()) {
        Word t{n};
        t.insert(t.end(), a.theta.begin(), a.theta.end());
        return ManifoldPoint{std::move(t), a.x, proj};
      }
      const double d = distance_to_image(-n, a.x);
      if (d <= tau()) return ManifoldPoint{{}, ifs_.apply(n, a.x), proj};
      if (d < 2.0 * tau()) throw Error(ErrorCode::AmbiguousMembership, "point on the boundary of f_i(A)");
      return ManifoldPoint{{n}, a.x, proj};
    }
    if (a.theta.empty()) return ManifoldPoint{{}, ifs_.apply(n, a.x), proj};
    if (a.theta.front() == -n) return ManifoldPoint{Word(a.theta.begin() + 1, a.theta.end()), a.x, proj};
    throw Error(ErrorCode::Domain, "sigma_" + std::to_string(n) + " leaves the negative-then-positive words");
  }

  // Fractional parts of leaf(theta): cloud points outside f_i(A), theta = ...(-i)
  std::vector<Point> leaf_fractional(const Word& theta) const {
    check_digits(theta, ifs_.size());
    if (theta.empty()) return cloud_.points;
    const int i = -theta.back();
    if (i <= 0) throw Error(ErrorCode::Domain, "leaf words use negative digits");
    std::vector<Point> out;
    for (const Point& x : cloud_.points)
      if (!near_image(i, x, tau())) out.push_back(x);
    if (out.empty()) throw Error(ErrorCode::EmptyLeaf, "leaf " + join_digits(theta) + " is empty");
    return out;
  }

  std::vector<Point> leaf_projection(const Word& theta) const {
    std::vector<Point> pts = leaf_fractional(theta);
    for (Point& p : pts) p = ifs_.apply_word(theta, p);
    return pts;
  }

  // Points where closures of a leaf and of one of its extensions meet.
  // tol is on the scale of the attractor: near an extension theta it is
  // stretched by Lip(f_theta), since the leaf condition cuts a tau band that
  // f_theta widens. The representative lies on the shorter leaf; the count is
  // that leaf plus every extension that comes within its stretched tol.
  std::vector<BranchPoint> branch_points(int depth, double tol) const {
    struct Leaf {
      Word theta;
      std::vector<Point> x, proj;
      KdTree tree;
      double tol = 0.0;
    };
    const Space s = ifs_.space();
    std::vector<Leaf> leaves;
    for (Word& t : enumerate_leaves(ifs_.size(), depth)) {
      Leaf l;
      try {
        l.x = leaf_fractional(t);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyLeaf) throw;
        continue;
      }
      l.proj = l.x;
      for (Point& p : l.proj) p = ifs_.apply_word(t, p);
      l.theta = std::move(t);
      l.tree = KdTree(s, l.proj);
      l.tol = tol * word_lipschitz(l.theta);
      leaves.push_back(std::move(l));
    }
    std::vector<BranchPoint> out;
    for (std::size_t a = 0; a < leaves.size(); ++a) {
      const Leaf& pa = leaves[a];
      // parent-side points near each extension, clustered at tol
      std::vector<std::size_t> candidates;
      for (std::size_t b = 0; b < leaves.size(); ++b) {
        const Leaf& lb = leaves[b];
        if (lb.theta.size() <= pa.theta.size() || !is_prefix(pa.theta, lb.theta)) continue;
        std::vector<std::pair<double, std::size_t>> near;
        for (std::size_t k = 0; k < pa.proj.size(); ++k) {
          const Vec3 q = embed(s, pa.proj[k]);
          if (!lb.tree.any_within(q, lb.tol)) continue;
          near.push_back({lb.tree.nearest_distance(q), k});
        }
        std::sort(near.begin(), near.end());
        std::vector<std::size_t> reps;
        for (const auto& [d, k] : near) {
          const bool covered = std::any_of(reps.begin(), reps.end(), [&](std::size_t r) {
            return fbe::distance(s, pa.proj[r], pa.proj[k]) <= lb.tol;
          });
          if (!covered) reps.push_back(k);
        }
        for (std::size_t r : reps) {
          const bool dup = std::any_of(candidates.begin(), candidates.end(), [&](std::size_t c) {
            return fbe::distance(s, pa.proj[c], pa.proj[r]) <= lb.tol;
          });
          if (!dup) candidates.push_back(r);
        }
      }
      for (std::size_t k : candidates) {
        int incident = 1;
        for (const Leaf& lb : leaves)
          if (lb.theta.size() > pa.theta.size() && is_prefix(pa.theta, lb.theta) &&
              lb.tree.any_within(embed(s, pa.proj[k]), lb.tol))
            ++incident;
        out.push_back({ManifoldPoint{pa.theta, pa.x[k], pa.proj[k]}, incident});
      }
    }
    return out;
  }

 private:
  IfsSystem ifs_;
  AttractorCloud cloud_;
  std::vector<KdTree> images_;
};

}  // namespace fbe
