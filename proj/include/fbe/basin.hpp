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
#include <optional>
#include <string>
#include <vector>

#include "fbe/attractor.hpp"
#include "fbe/coding.hpp"
#include "fbe/errors.hpp"
#include "fbe/ifs.hpp"
#include "fbe/parallel.hpp"
#include "fbe/symbolic.hpp"

namespace fbe {

// All positive words of length len, lexicographic.
inline std::vector<Word> positive_words(int n_maps, std::size_t len) {
  std::vector<Word> out;
  Word w(len, 1);
  while (true) {
    out.push_back(w);
    std::size_t j = len;
    while (j > 0 && w[j - 1] == n_maps) w[--j] = 1;
    if (j == 0) break;
    ++w[j - 1];
  }
  return out;
}

struct ContinuationCloud {
  Word theta_prefix;
  std::size_t k = 0;
  std::vector<Point> points;
};

inline void require_positive(const Word& w) {
  for (int d : w)
    if (d <= 0) throw Error(ErrorCode::Domain, "continuation words are positive");
}

// f_{-theta_1} o ... o f_{-theta_k} applied to the cloud
inline ContinuationCloud finite_continuation(const IfsSystem& ifs, const AttractorCloud& cloud, const Address& theta,
                                             std::size_t k) {
  if (theta.is_finite() && k > theta.finite_length())
    throw Error(ErrorCode::Depth, "theta has only " + std::to_string(theta.finite_length()) + " digits");
  ContinuationCloud c;
  c.theta_prefix = theta.prefix(k);
  check_digits(c.theta_prefix, ifs.size());
  require_positive(c.theta_prefix);
  c.k = k;
  const Word inv = negate(c.theta_prefix);
  c.points.resize(cloud.points.size());
  parallel_for(cloud.points.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) c.points[i] = ifs.apply_word(inv, cloud.points[i]);
  });
  return c;
}

// Grid over a box; a cell is hit when a marked point lies in the closed cell
// inflated by tau. depth holds the smallest marking depth, -1 for a miss.
// One-dimensional rasters have ny == 1 and ignore y.
class Raster {
 public:
  Raster(Box region, int nx, int ny, double tau, bool one_dim)
      : region_(region), nx_(nx), ny_(one_dim ? 1 : ny), tau_(tau), one_dim_(one_dim),
        depth_(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), -1) {
    if (nx_ < 1 || ny_ < 1) throw Error(ErrorCode::Domain, "raster needs at least one cell");
    if (!(region.x1 > region.x0) || (!one_dim && !(region.y1 > region.y0)))
      throw Error(ErrorCode::Domain, "empty raster region");
    const double hx = (region.x1 - region.x0) / nx_;
    const double hy = one_dim ? hx : (region.y1 - region.y0) / ny_;
    resolution_warning_ = std::min(hx, hy) < tau;
  }

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  const Box& region() const noexcept { return region_; }
  double tau() const noexcept { return tau_; }
  bool one_dim() const noexcept { return one_dim_; }
  bool resolution_warning() const noexcept { return resolution_warning_; }
  const std::vector<int>& depths() const noexcept { return depth_; }

  int depth(int ix, int iy) const { return depth_[index(ix, iy)]; }
  bool hit(int ix, int iy) const { return depth(ix, iy) >= 0; }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count_if(depth_.begin(), depth_.end(), [](int d) { return d >= 0; }));
  }

  double cell_x(int i) const { return region_.x0 + (region_.x1 - region_.x0) * i / nx_; }
  double cell_y(int j) const { return one_dim_ ? 0.0 : region_.y0 + (region_.y1 - region_.y0) * j / ny_; }
  Point cell_center(int ix, int iy) const {
    return {(cell_x(ix) + cell_x(ix + 1)) / 2, one_dim_ ? 0.0 : (cell_y(iy) + cell_y(iy + 1)) / 2};
  }

  void mark(const Point& p, int d) {
    if (p.infinite || !std::isfinite(p.x) || !std::isfinite(p.y)) return;
    int xlo, xhi, ylo = 0, yhi = 0;
    if (!span(p.x, region_.x0, region_.x1, nx_, xlo, xhi)) return;
    if (!one_dim_ && !span(p.y, region_.y0, region_.y1, ny_, ylo, yhi)) return;
    for (int j = ylo; j <= yhi; ++j) {
      if (!one_dim_ && !(cell_y(j) - tau_ <= p.y && p.y <= cell_y(j + 1) + tau_)) continue;
      for (int i = xlo; i <= xhi; ++i) {
        if (!(cell_x(i) - tau_ <= p.x && p.x <= cell_x(i + 1) + tau_)) continue;
        int& slot = depth_[index(i, j)];
        if (slot < 0 || d < slot) slot = d;
      }
    }
  }

  void merge(const Raster& o) {
    for (std::size_t i = 0; i < depth_.size(); ++i) {
      const int d = o.depth_[i];
      if (d >= 0 && (depth_[i] < 0 || d < depth_[i])) depth_[i] = d;
    }
  }

  bool operator==(const Raster& o) const { return nx_ == o.nx_ && ny_ == o.ny_ && depth_ == o.depth_; }

 private:
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(ix);
  }

  // candidate cell range, widened by one cell on each side; exact test in mark()
  bool span(double v, double lo, double hi, int n, int& a, int& b) const {
    const double h = (hi - lo) / n;
    const double fa = std::floor((v - tau_ - lo) / h) - 1.0;
    const double fb = std::floor((v + tau_ - lo) / h) + 1.0;
    if (fb < 0.0 || fa > n - 1) return false;
    a = static_cast<int>(std::max(0.0, fa));
    b = static_cast<int>(std::min<double>(n - 1, fb));
    return a <= b;
  }

  Box region_;
  int nx_, ny_;
  double tau_;
  bool one_dim_;
  bool resolution_warning_ = false;
  std::vector<int> depth_;
};

inline Raster make_raster(const IfsSystem& ifs, const Box& region, int nx, int ny, double tau) {
  return Raster(region, nx, ny, tau, ifs.space() == Space::R1);
}

namespace detail {

inline void basin_dfs(const IfsSystem& ifs, const std::vector<Point>& img, int level, int depth, Raster& r) {
  for (const Point& p : img) r.mark(p, level);
  if (level == depth) return;
  std::vector<Point> next(img.size());
  for (int j = 1; j <= ifs.size(); ++j) {
    const MapSpec& g = ifs.map(-j);
    for (std::size_t i = 0; i < img.size(); ++i) next[i] = apply(g, img[i]);
    basin_dfs(ifs, next, level + 1, depth, r);
  }
}

}  // namespace detail

// Union of f_w^{-1}(cloud) over positive words |w| <= depth, built by
// applying one inverse map per tree level.
inline Raster fast_basin_raster(const IfsSystem& ifs, const AttractorCloud& cloud, const Box& region, int nx, int ny,
                                int depth, std::optional<double> tau = std::nullopt) {
  if (depth < 0) throw Error(ErrorCode::Depth, "negative depth");
  Raster r = make_raster(ifs, region, nx, ny, tau.value_or(cloud.tau()));
  for (const Point& p : cloud.points) r.mark(p, 0);
  if (depth == 0) return r;
  const int n = ifs.size();
  std::vector<Raster> part(static_cast<std::size_t>(n), r);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      const MapSpec& g = ifs.map(-static_cast<int>(j + 1));
      std::vector<Point> img(cloud.points.size());
      for (std::size_t i = 0; i < img.size(); ++i) img[i] = apply(g, cloud.points[i]);
      detail::basin_dfs(ifs, img, 1, depth, part[j]);
    }
  }, 1);
  for (const Raster& p : part) r.merge(p);
  return r;
}

// Same set as fast_basin_raster, computed as the union of the finite
// continuations B_{theta|k} = f_{-theta|k}(A) over all positive theta with
// |theta| <= depth, each evaluated from scratch.
inline Raster continuation_union_raster(const IfsSystem& ifs, const AttractorCloud& cloud, const Box& region, int nx,
                                        int ny, int depth, std::optional<double> tau = std::nullopt) {
  if (depth < 0) throw Error(ErrorCode::Depth, "negative depth");
  Raster r = make_raster(ifs, region, nx, ny, tau.value_or(cloud.tau()));
  for (int len = 0; len <= depth; ++len) {
    for (const Word& theta : positive_words(ifs.size(), static_cast<std::size_t>(len))) {
      const ContinuationCloud c = finite_continuation(ifs, cloud, Address::finite(theta), theta.size());
      for (const Point& p : c.points) r.mark(p, len);
    }
  }
  return r;
}

enum class MembershipStatus { Yes, NoUpToDepth };

struct MembershipResult {
  MembershipStatus status = MembershipStatus::NoUpToDepth;
  Word witness;  // f_witness(x) reaches the cloud
  int depth_searched = 0;
  double tolerance = 0.0;

  bool yes() const { return status == MembershipStatus::Yes; }
};

inline void require_tolerance(const AttractorCloud& cloud, double tol) {
  if (tol < cloud.tau() * (1.0 - 1e-12))
    throw Error(ErrorCode::Resolution, "tolerance " + format_double(tol) + " below cloud resolution " +
                                           format_double(cloud.tau()));
}

// Shortest positive word w, lexicographically first among equals, with
// f_w(x) within tol of the cloud.
inline MembershipResult membership(const IfsSystem& ifs, const AttractorCloud& cloud, const Point& x, int depth,
                                   double tol) {
  require_tolerance(cloud, tol);
  MembershipResult res;
  res.tolerance = tol;
  for (int len = 0; len <= depth; ++len) {
    res.depth_searched = len;
    for (const Word& w : positive_words(ifs.size(), static_cast<std::size_t>(len))) {
      if (cloud.within(ifs.apply_word(w, x), tol)) {
        res.status = MembershipStatus::Yes;
        res.witness = w;
        return res;
      }
    }
  }
  return res;
}

// Membership restricted to B_theta: y_k = f_{theta_k}(y_{k-1}) must reach the
// cloud. The witness is reported in f_w order, (theta_k, ..., theta_1).
inline MembershipResult membership_along(const IfsSystem& ifs, const AttractorCloud& cloud, const Point& x,
                                         const Address& theta, int depth, double tol) {
  require_tolerance(cloud, tol);
  MembershipResult res;
  res.tolerance = tol;
  Point y = x;
  Word path;
  for (int k = 0; k <= depth; ++k) {
    res.depth_searched = k;
    if (k > 0) {
      if (theta.is_finite() && static_cast<std::size_t>(k) > theta.finite_length()) break;
      const int d = theta.digit(static_cast<std::size_t>(k - 1));
      if (d <= 0) throw Error(ErrorCode::Domain, "theta must be positive");
      y = ifs.apply(d, y);
      path.push_back(d);
    }
    if (cloud.within(y, tol)) {
      res.status = MembershipStatus::Yes;
      res.witness.assign(path.rbegin(), path.rend());
      return res;
    }
  }
  return res;
}

// Periodic sufficient condition for reversibility: the attractor covers the
// margin-ball around pi(overline(reverse(period))).
inline bool is_reversible_periodic(const IfsSystem& ifs, const AttractorCloud& cloud, const Word& period,
                                   double margin) {
  if (period.empty()) throw Error(ErrorCode::Domain, "empty period");
  check_digits(period, ifs.size());
  require_positive(period);
  if (margin < 3.0 * cloud.epsilon)
    throw Error(ErrorCode::Resolution, "margin below 3 epsilon = " + format_double(3.0 * cloud.epsilon));
  const Point p = coding_map(ifs, Address::periodic({}, Word(period.rbegin(), period.rend())));
  const Space s = ifs.space();
  std::vector<Point> samples;
  double spacing;
  if (s == Space::R1) {
    spacing = std::max(cloud.epsilon / 2, margin / 400);
    for (double t = -margin; t <= margin; t += spacing) samples.push_back({p.x + t, 0.0});
    samples.push_back({p.x + margin, 0.0});
  } else {
    if (p.infinite) return false;
    // on the sphere the chordal ball is approximated in the chart at p
    const double rad = s == Space::Sphere ? margin * (1.0 + p.x * p.x + p.y * p.y) / 2.0 : margin;
    spacing = std::max(cloud.epsilon / 2, margin / 60);
    const double step = spacing * rad / margin;
    for (double u = -rad; u <= rad; u += step)
      for (double v = -rad; v <= rad; v += step)
        if (u * u + v * v <= rad * rad) samples.push_back({p.x + u, p.y + v});
  }
  const double cover = cloud.epsilon + spacing;
  return std::all_of(samples.begin(), samples.end(), [&](const Point& q) { return cloud.within(q, cover); });
}

struct BasinInclusionReport {
  std::vector<MembershipResult> results;
  double fraction = 0.0;
  std::vector<MembershipResult> theta_results;  // empty when no theta given
  double theta_fraction = 0.0;
};

inline BasinInclusionReport basin_inclusion_check(const IfsSystem& ifs, const AttractorCloud& cloud,
                                                  const std::vector<Point>& samples, int depth, double tol,
                                                  const std::optional<Address>& theta = std::nullopt) {
  BasinInclusionReport rep;
  if (samples.empty()) return rep;
  std::size_t yes = 0, theta_yes = 0;
  for (const Point& x : samples) {
    rep.results.push_back(membership(ifs, cloud, x, depth, tol));
    yes += rep.results.back().yes();
    if (theta) {
      rep.theta_results.push_back(membership_along(ifs, cloud, x, *theta, depth, tol));
      theta_yes += rep.theta_results.back().yes();
    }
  }
  rep.fraction = static_cast<double>(yes) / static_cast<double>(samples.size());
  if (theta) rep.theta_fraction = static_cast<double>(theta_yes) / static_cast<double>(samples.size());
  return rep;
}

}  // namespace fbe
