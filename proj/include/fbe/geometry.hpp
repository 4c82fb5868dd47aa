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
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "fbe/errors.hpp"

namespace fbe {

enum class Space { R1, R2, Sphere };

// R1 uses x only. On the sphere (x, y) is the complex number x + iy and
// `infinite` marks the north pole.
struct Point {
  double x = 0.0;
  double y = 0.0;
  bool infinite = false;

  bool operator==(const Point&) const = default;
};

inline Point infinity() { return Point{0.0, 0.0, true}; }

using Vec3 = std::array<double, 3>;

inline int embed_dim(Space s) { return s == Space::R1 ? 1 : s == Space::R2 ? 2 : 3; }

// Isometric embedding into R^3. The sphere goes to the unit sphere by inverse
// stereographic projection, so Euclidean distance there is the chordal metric.
inline Vec3 embed(Space s, const Point& p) {
  switch (s) {
    case Space::R1: return {p.x, 0.0, 0.0};
    case Space::R2: return {p.x, p.y, 0.0};
    case Space::Sphere: {
      if (p.infinite) return {0.0, 0.0, 1.0};
      const double r2 = p.x * p.x + p.y * p.y;
      if (!std::isfinite(r2)) return {0.0, 0.0, 1.0};
      const double k = 1.0 / (1.0 + r2);
      return {2.0 * p.x * k, 2.0 * p.y * k, (r2 - 1.0) * k};
    }
  }
  return {};
}

inline double dist2(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

inline double distance(Space s, const Point& a, const Point& b) {
  switch (s) {
    case Space::R1: return std::abs(a.x - b.x);
    case Space::R2: return std::hypot(a.x - b.x, a.y - b.y);
    case Space::Sphere: return std::sqrt(dist2(embed(s, a), embed(s, b)));
  }
  return 0.0;
}

struct Box {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  bool contains(const Point& p) const {
    return !p.infinite && p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
};

inline Box bounding_box(std::span<const Point> pts) {
  Box b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Point& p : pts) {
    if (p.infinite) continue;
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

// Static kd-tree over embedded points, exact nearest neighbour.
class KdTree {
 public:
  KdTree() = default;

  explicit KdTree(std::vector<Vec3> pts) : pts_(std::move(pts)), perm_(pts_.size()) {
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    if (!pts_.empty()) build(0, pts_.size());
  }

  KdTree(Space s, std::span<const Point> pts) : KdTree(embed_all(s, pts)) {}

  bool empty() const noexcept { return pts_.empty(); }
  std::size_t size() const noexcept { return pts_.size(); }

  // (index, squared distance)
  std::pair<std::size_t, double> nearest(const Vec3& q) const {
    std::pair<std::size_t, double> best{0, std::numeric_limits<double>::infinity()};
    if (!nodes_.empty()) search(0, q, best);
    return best;
  }

  double nearest_distance(const Vec3& q) const { return std::sqrt(nearest(q).second); }

  // is some point within distance r of q? Prunes at r, so far queries are cheap.
  bool any_within(const Vec3& q, double r) const { return !nodes_.empty() && r >= 0.0 && probe(0, q, r * r); }

  static std::vector<Vec3> embed_all(Space s, std::span<const Point> pts) {
    std::vector<Vec3> e(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) e[i] = embed(s, pts[i]);
    return e;
  }

 private:
  static constexpr std::size_t kLeaf = 8;

  struct Node {
    std::size_t lo, hi;
    int axis = -1;  // -1: leaf
    double split = 0.0;
    int left = -1, right = -1;
  };

  int build(std::size_t lo, std::size_t hi) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{lo, hi});
    if (hi - lo <= kLeaf) return id;
    Vec3 mn{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 mx{-mn[0], -mn[1], -mn[2]};
    for (std::size_t i = lo; i < hi; ++i)
      for (int a = 0; a < 3; ++a) {
        mn[a] = std::min(mn[a], pts_[perm_[i]][a]);
        mx[a] = std::max(mx[a], pts_[perm_[i]][a]);
      }
    int axis = 0;
    for (int a = 1; a < 3; ++a)
      if (mx[a] - mn[a] > mx[axis] - mn[axis]) axis = a;
    if (mx[axis] == mn[axis]) return id;  // all coincide
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(perm_.begin() + static_cast<std::ptrdiff_t>(lo), perm_.begin() + static_cast<std::ptrdiff_t>(mid),
                     perm_.begin() + static_cast<std::ptrdiff_t>(hi),
                     [&](std::size_t a, std::size_t b) { return pts_[a][axis] < pts_[b][axis]; });
    const double split = pts_[perm_[mid]][axis];
    const int l = build(lo, mid);
    const int r = build(mid, hi);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  void search(int id, const Vec3& q, std::pair<std::size_t, double>& best) const {
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (std::size_t i = n.lo; i < n.hi; ++i) {
        const double d = dist2(q, pts_[perm_[i]]);
        if (d < best.second || (d == best.second && perm_[i] < best.first)) best = {perm_[i], d};
      }
      return;
    }
    const double diff = q[n.axis] - n.split;
    const int near = diff < 0 ? n.left : n.right;
    const int far = diff < 0 ? n.right : n.left;
    search(near, q, best);
    if (diff * diff <= best.second) search(far, q, best);
  }

  bool probe(int id, const Vec3& q, double r2) const {
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (std::size_t i = n.lo; i < n.hi; ++i)
        if (dist2(q, pts_[perm_[i]]) <= r2) return true;
      return false;
    }
    const double diff = q[n.axis] - n.split;
    if (probe(diff < 0 ? n.left : n.right, q, r2)) return true;
    return diff * diff <= r2 && probe(diff < 0 ? n.right : n.left, q, r2);
  }

  std::vector<Vec3> pts_;
  std::vector<std::size_t> perm_;
  std::vector<Node> nodes_;
};

inline double directed_hausdorff(Space s, std::span<const Point> a, const KdTree& tb) {
  double worst = 0.0;
  for (const Point& p : a) worst = std::max(worst, tb.nearest(embed(s, p)).second);
  return std::sqrt(worst);
}

inline double hausdorff_distance(Space s, std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::Domain, "Hausdorff distance of an empty set");
  const KdTree ta(s, a), tb(s, b);
  return std::max(directed_hausdorff(s, a, tb), directed_hausdorff(s, b, ta));
}

// O(|a||b|) reference implementation.
inline double hausdorff_distance_brute(Space s, std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::Domain, "Hausdorff distance of an empty set");
  const auto directed = [s](std::span<const Point> u, std::span<const Point> v) {
    double worst = 0.0;
    for (const Point& p : u) {
      double best = std::numeric_limits<double>::infinity();
      for (const Point& q : v) best = std::min(best, distance(s, p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace fbe
