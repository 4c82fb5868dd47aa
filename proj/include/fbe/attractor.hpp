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

#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "fbe/errors.hpp"
#include "fbe/geometry.hpp"
#include "fbe/ifs.hpp"
#include "fbe/parallel.hpp"
#include "fbe/random.hpp"

namespace fbe {

// Finite point set with d_H(points, A) <= epsilon.
struct AttractorCloud {
  Space space = Space::R1;
  std::vector<Point> points;
  double epsilon = 0.0;
  std::string ifs_hash;
  int depth = 0;
  double cell = 0.0;
  double lambda = 0.0;      // contraction factor used for epsilon
  bool contractive = true;  // false: epsilon carries no guarantee
  double residual = 0.0;    // d_H(F(points), points)
  std::shared_ptr<const KdTree> tree;

  // default membership tolerance for "x in A"
  double tau() const { return 3.0 * epsilon; }

  double distance_to(const Point& p) const { return tree->nearest_distance(embed(space, p)); }
  bool within(const Point& p, double r) const { return tree->any_within(embed(space, p), r); }

  void build_index() { tree = std::make_shared<const KdTree>(space, points); }
};

// Uniform grid of side cell / sqrt(dim) in the embedding, so points sharing
// a key are within `cell` of each other.
class GridDedup {
 public:
  GridDedup(Space s, double cell) : space_(s), side_(cell / std::sqrt(static_cast<double>(embed_dim(s)))) {
    if (!(cell > 0.0)) throw Error(ErrorCode::Domain, "dedup cell must be positive");
  }

  bool insert(const Point& p) { return keys_.insert(key(p)).second; }

 private:
  using Key = std::array<std::int64_t, 3>;

  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::uint64_t h = 0x9e3779b97f4a7c15ULL;
      for (auto v : k) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      }
      return static_cast<std::size_t>(h);
    }
  };

  Key key(const Point& p) const {
    const Vec3 e = embed(space_, p);
    Key k{};
    for (int i = 0; i < 3; ++i) {
      const double q = std::floor(e[i] / side_);
      k[i] = static_cast<std::int64_t>(std::clamp(q, -4.0e18, 4.0e18));
    }
    return k;
  }

  Space space_;
  double side_;
  std::unordered_set<Key, KeyHash> keys_;
};

namespace detail {

struct PointBits {
  std::uint64_t x, y;
  bool inf;
  bool operator==(const PointBits&) const = default;
};

struct PointBitsHash {
  std::size_t operator()(const PointBits& b) const noexcept {
    return static_cast<std::size_t>(b.x * 0x9e3779b97f4a7c15ULL ^ (b.y + (b.inf ? 1 : 0)) * 0xc2b2ae3d27d4eb4fULL);
  }
};

inline PointBits bits(const Point& p) {
  return {std::bit_cast<std::uint64_t>(p.x), std::bit_cast<std::uint64_t>(p.y), p.infinite};
}

// F(points) in map-major order: all of f_1, then f_2, ...
inline std::vector<Point> hutchinson_images(const IfsSystem& ifs, std::span<const Point> pts) {
  const std::size_t n = pts.size();
  std::vector<Point> out(n * static_cast<std::size_t>(ifs.size()));
  for (int i = 1; i <= ifs.size(); ++i) {
    const MapSpec& f = ifs.map(i);
    Point* dst = out.data() + (i - 1) * n;
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t k = lo; k < hi; ++k) dst[k] = apply(f, pts[k]);
    });
  }
  return out;
}

inline double directed_parallel(Space s, std::span<const Point> a, const KdTree& tb) {
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (a.size() + kChunk - 1) / kChunk;
  std::vector<double> part(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t c = lo; c < hi; ++c) {
      double w = 0.0;
      for (std::size_t k = c * kChunk; k < std::min(a.size(), (c + 1) * kChunk); ++k)
        w = std::max(w, tb.nearest(embed(s, a[k])).second);
      part[c] = w;
    }
  }, 1);
  double w = 0.0;
  for (double v : part) w = std::max(w, v);
  return std::sqrt(w);
}

inline double hausdorff_parallel(Space s, std::span<const Point> a, const KdTree& ta, std::span<const Point> b,
                                 const KdTree& tb) {
  return std::max(directed_parallel(s, a, tb), directed_parallel(s, b, ta));
}

// Largest contraction factor seen: exact for affine maps, sampled over the
// given points for Moebius maps.
inline double contraction_factor(const IfsSystem& ifs, std::span<const Point> pts) {
  double l = 0.0;
  for (int i = 1; i <= ifs.size(); ++i) {
    const MapSpec& f = ifs.map(i);
    if (const auto* g = std::get_if<AffineMap>(&f)) {
      l = std::max(l, g->operator_norm());
    } else {
      const auto& m = std::get<MoebiusMap>(f);
      for (const Point& p : pts) l = std::max(l, m.chordal_derivative(p));
    }
  }
  return l;
}

inline void finish(const IfsSystem& ifs, AttractorCloud& c) {
  c.build_index();
  const std::vector<Point> img = hutchinson_images(ifs, c.points);
  const KdTree timg(c.space, img);
  c.residual = hausdorff_parallel(c.space, img, timg, c.points, *c.tree);
  c.lambda = contraction_factor(ifs, c.points);
  c.contractive = c.lambda < 1.0;
  const double bound = c.contractive ? c.residual / (1.0 - c.lambda) : c.residual;
  c.epsilon = std::max(c.cell, bound);
  c.ifs_hash = ifs.hash();
}

}  // namespace detail

inline constexpr std::size_t kMaxCloudPoints = std::size_t{1} << 23;

// Hutchinson iteration with grid dedup. Images that reproduce a point of the
// previous cloud bit-for-bit claim their cell first, so exactly known points
// (fixed points and their images) survive refinement.
inline AttractorCloud attractor(const IfsSystem& ifs, std::vector<Point> seed, int depth, double cell) {
  if (seed.empty()) throw Error(ErrorCode::Domain, "empty seed");
  AttractorCloud c;
  c.space = ifs.space();
  c.cell = cell;
  {
    GridDedup g(c.space, cell);
    for (const Point& p : seed)
      if (g.insert(p)) c.points.push_back(p);
  }
  double r = std::numeric_limits<double>::infinity();
  int k = 0;
  while (k < depth) {
    ++k;
    const std::vector<Point> img = detail::hutchinson_images(ifs, c.points);
    std::unordered_set<detail::PointBits, detail::PointBitsHash> prior;
    prior.reserve(c.points.size() * 2);
    for (const Point& p : c.points) prior.insert(detail::bits(p));
    std::vector<char> is_prior(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) is_prior[i] = prior.count(detail::bits(img[i])) != 0;
    GridDedup g(c.space, cell);
    std::vector<Point> next;
    for (int pass = 1; pass >= 0; --pass)
      for (std::size_t i = 0; i < img.size(); ++i)
        if (is_prior[i] == pass && g.insert(img[i])) next.push_back(img[i]);
    if (next.size() > kMaxCloudPoints)
      throw Error(ErrorCode::NoConvergence, "cloud exceeds " + std::to_string(kMaxCloudPoints) + " points", r);
    const KdTree ta(c.space, c.points), tb(c.space, next);
    r = detail::hausdorff_parallel(c.space, c.points, ta, next, tb);
    c.points = std::move(next);
    if (r <= cell) break;
  }
  c.depth = k;
  detail::finish(ifs, c);
  if (r > cell && !c.contractive)
    throw Error(ErrorCode::NoConvergence, "no convergence after " + std::to_string(k) + " iterations", r);
  return c;
}

inline AttractorCloud attractor(const IfsSystem& ifs, int depth, double cell) {
  return attractor(ifs, ifs.default_seed(), depth, cell);
}

// Random orbit from the attracting fixed point of f_1; every emitted point
// lies on the attractor, epsilon measures coverage.
inline AttractorCloud chaos_game(const IfsSystem& ifs, std::size_t n, std::size_t burn_in, std::uint64_t rng_seed) {
  if (n <= burn_in) throw Error(ErrorCode::Domain, "chaos game needs n > burn_in");
  Rng rng(rng_seed);
  Point x = attracting_fixed_point(ifs.map(1));
  AttractorCloud c;
  c.space = ifs.space();
  c.points.reserve(n - burn_in);
  for (std::size_t i = 0; i < n; ++i) {
    const int d = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(ifs.size())));
    x = ifs.apply(d, x);
    if (i >= burn_in) c.points.push_back(x);
  }
  c.depth = static_cast<int>(n);
  detail::finish(ifs, c);
  return c;
}

}  // namespace fbe
