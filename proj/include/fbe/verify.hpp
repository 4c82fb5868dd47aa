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

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fbe/attractor.hpp"
#include "fbe/basin.hpp"
#include "fbe/coding.hpp"
#include "fbe/ifs.hpp"
#include "fbe/io.hpp"
#include "fbe/manifold.hpp"
#include "fbe/random.hpp"
#include "fbe/symbolic.hpp"

namespace fbe {

struct CheckResult {
  std::string name;
  std::string tag;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
  double runtime = 0.0;  // seconds
  std::string note;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }

  std::string text() const {
    std::string out;
    for (const auto& c : checks) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "[%s] %-22s residual=%.3e tol=%.3e (%.2fs)", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.residual, c.tolerance, c.runtime);
      out += buf;
      if (!c.note.empty()) out += "  " + c.note;
      out += "\n";
    }
    return out;
  }

  std::string json() const {
    std::string out = "{ \"passed\": " + std::string(passed() ? "true" : "false") + ", \"checks\": [";
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const auto& c = checks[i];
      out += std::string(i ? ", " : "") + "{ \"name\": " + json_string(c.name) + ", \"tag\": " + json_string(c.tag) +
             ", \"status\": " + json_string(c.pass ? "pass" : "fail") + ", \"residual\": " + format_double(c.residual) +
             ", \"tolerance\": " + format_double(c.tolerance) + ", \"runtime\": " + format_double(c.runtime) + " }";
    }
    return out + "] }";
  }
};

struct VerifyOptions {
  int samples = 100;
  std::uint64_t seed = 1;
  double cell = 0.0;  // 0: pick by space
  int depth = 400;
};

inline double default_cell(Space s) { return s == Space::R1 ? 1e-4 : s == Space::R2 ? 2e-3 : 1e-3; }

namespace detail {

inline void run_check(VerifyReport& rep, const std::string& name, const std::string& tag, double tol,
                      const std::function<double()>& body) {
  CheckResult c;
  c.name = name;
  c.tag = tag;
  c.tolerance = tol;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    c.residual = body();
  } catch (const std::exception& e) {
    c.residual = std::numeric_limits<double>::infinity();
    c.note = e.what();
  }
  c.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.pass = c.residual <= c.tolerance;
  rep.checks.push_back(std::move(c));
}

inline Word random_word(Rng& rng, int n_maps, int max_len, bool positive) {
  Word w(static_cast<std::size_t>(uniform_int(rng, 0, max_len)));
  for (int& d : w) {
    d = uniform_int(rng, 1, n_maps);
    if (!positive && uniform_below(rng, 2)) d = -d;
  }
  return w;
}

inline double coefficient_gap(const MapSpec& a, const MapSpec& b) {
  if (a.index() != b.index()) return std::numeric_limits<double>::infinity();
  double g = 0.0;
  if (const auto* f = std::get_if<AffineMap>(&a)) {
    const auto& h = std::get<AffineMap>(b);
    for (int i = 0; i < 4; ++i) g = std::max(g, std::abs(f->m[i] - h.m[i]));
    for (int i = 0; i < 2; ++i) g = std::max(g, std::abs(f->t[i] - h.t[i]));
  } else {
    const auto& f2 = std::get<MoebiusMap>(a);
    const auto& h = std::get<MoebiusMap>(b);
    // a Moebius map is defined up to sign
    double p = 0.0, m = 0.0;
    const Complex x[4] = {f2.a, f2.b, f2.c, f2.d}, y[4] = {h.a, h.b, h.c, h.d};
    for (int i = 0; i < 4; ++i) {
      p = std::max(p, std::abs(x[i] - y[i]));
      m = std::max(m, std::abs(x[i] + y[i]));
    }
    g = std::min(p, m);
  }
  return g;
}

}  // namespace detail

// Region around the cloud used for raster checks: its box grown threefold.
inline Box check_region(const AttractorCloud& c) {
  Box b = bounding_box(c.points);
  const double w = std::max({b.x1 - b.x0, b.y1 - b.y0, 1e-3});
  const double cx = (b.x0 + b.x1) / 2, cy = (b.y0 + b.y1) / 2;
  return {cx - 1.5 * w, cy - 1.5 * w, cx + 1.5 * w, cy + 1.5 * w};
}

inline VerifyReport verify_suite(const IfsSystem& ifs, const VerifyOptions& opt = {}) {
  VerifyReport rep;
  const Space s = ifs.space();
  const int N = ifs.size();
  const double cell = opt.cell > 0 ? opt.cell : default_cell(s);
  AttractorCloud cloud;
  detail::run_check(rep, "attractor-invariance", "F(A)=A", 0.0, [&] {
    cloud = cached_attractor(ifs, opt.depth, cell);
    return 0.0;
  });
  if (!rep.passed()) return rep;
  rep.checks.back().residual = cloud.residual;
  rep.checks.back().tolerance = 2 * cloud.epsilon;
  rep.checks.back().pass = cloud.residual <= 2 * cloud.epsilon;

  Rng rng(opt.seed);
  const auto random_cloud_point = [&] { return cloud.points[uniform_below(rng, cloud.points.size())]; };

  detail::run_check(rep, "word-composition", "f_{uv}=f_u o f_v", 1e-12, [&] {
    double r = 0.0;
    for (int i = 0; i < opt.samples; ++i) {
      const Word u = detail::random_word(rng, N, 4, false), v = detail::random_word(rng, N, 4, false);
      Word uv = u;
      uv.insert(uv.end(), v.begin(), v.end());
      const Point x = random_cloud_point();
      r = std::max(r, distance(s, ifs.apply_word(uv, x), ifs.apply_word(u, ifs.apply_word(v, x))));
    }
    return r;
  });

  detail::run_check(rep, "inverse-word", "f_w o f_{-w reversed}=id", 1e-9, [&] {
    double r = 0.0;
    for (int i = 0; i < opt.samples; ++i) {
      const Word w = detail::random_word(rng, N, 8, false);
      const Word back = negate(Word(w.rbegin(), w.rend()));
      const Point x = random_cloud_point();
      r = std::max(r, distance(s, ifs.apply_word(w, ifs.apply_word(back, x)), x));
    }
    return r;
  });

  detail::run_check(rep, "sigma-inverse", "sigma_{-n} o sigma_n=id", 0.0, [&] {
    double bad = 0.0;
    for (int i = 0; i < opt.samples; ++i) {
      const Address a = random_address(rng, N, AddressKind::Reduced);
      for (int n = -N; n <= N; ++n)
        if (n != 0 && !(sigma(-n, sigma(n, a)) == a)) bad += 1;
    }
    return bad;
  });

  detail::run_check(rep, "coding-base-point", "pi independent of b", 1e-9, [&] {
    double r = 0.0;
    const std::vector<Point> seeds = ifs.default_seed();
    for (int i = 0; i < opt.samples; ++i) {
      const Address a = random_address(rng, N, AddressKind::Positive);
      const Word& pre = a.preperiod();
      const Point x1 = detail::tail_limit(ifs, pre, a.period(), seeds.front(), 1e-13);
      const Point x2 = detail::tail_limit(ifs, pre, a.period(), random_cloud_point(), 1e-13);
      r = std::max(r, distance(s, x1, x2));
    }
    return r;
  });

  detail::run_check(rep, "semiconjugacy", "pi o sigma_n = f_n o pi", 1e-9, [&] {
    return verify_semiconjugacy(ifs, opt.samples, 1e-9, opt.seed).max_residual;
  });

  detail::run_check(rep, "dual-involution", "dual(dual(F))=F", 1e-12, [&] {
    const IfsSystem dd = ifs.dual().dual();
    double g = 0.0;
    for (int i = 1; i <= N; ++i) g = std::max(g, detail::coefficient_gap(ifs.map(i), dd.map(i)));
    return g;
  });

  detail::run_check(rep, "hausdorff-kd", "kd-tree = brute force", 1e-12, [&] {
    std::vector<Point> a, b;
    for (int i = 0; i < 200; ++i) a.push_back(random_cloud_point());
    for (int i = 0; i < 150; ++i) b.push_back(ifs.apply(1 + static_cast<int>(uniform_below(rng, N)), random_cloud_point()));
    return std::abs(hausdorff_distance(s, a, b) - hausdorff_distance_brute(s, a, b));
  });

  // nesting is measured in units of tau times the inverse word's expansion
  detail::run_check(rep, "continuation-nesting", "B_{theta|k} nested", 1.0, [&] {
    const Word theta = disjunctive_prefix(N, 4);
    double worst = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto a = finite_continuation(ifs, cloud, Address::finite(theta), k);
      const auto b = finite_continuation(ifs, cloud, Address::finite(theta), k + 1);
      const double lip = [&] {
        double l = 1.0;
        for (std::size_t i = 0; i <= k; ++i) l *= global_lipschitz(ifs.map(-theta[i]));
        return l;
      }();
      const KdTree tb(s, b.points);
      const double d = directed_hausdorff(s, a.points, tb);
      worst = std::max(worst, d / (cloud.tau() * lip));
    }
    return worst;
  });

  const Box region = check_region(cloud);
  const int grid = s == Space::R1 ? 2048 : 256;
  detail::run_check(rep, "raster-monotone", "hits nondecreasing in depth", 0.0, [&] {
    double bad = 0.0;
    std::size_t prev = 0;
    for (int d = 0; d <= 3; ++d) {
      const Raster r = fast_basin_raster(ifs, cloud, region, grid, grid, d);
      if (r.count() < prev) bad += 1;
      prev = r.count();
    }
    return bad;
  });

  detail::run_check(rep, "fast-basin-union", "fast basin = union of continuations", 0.0, [&] {
    const Raster a = fast_basin_raster(ifs, cloud, region, grid, grid, 3);
    const Raster b = continuation_union_raster(ifs, cloud, region, grid, grid, 3);
    double bad = 0.0;
    for (std::size_t i = 0; i < a.depths().size(); ++i) bad += a.depths()[i] != b.depths()[i];
    return bad;
  });

  detail::run_check(rep, "raster-membership", "hit cell => member", 0.0, [&] {
    const Raster r = fast_basin_raster(ifs, cloud, region, grid, grid, 2);
    const double hx = (region.x1 - region.x0) / r.nx();
    const double hy = r.one_dim() ? 0.0 : (region.y1 - region.y0) / r.ny();
    const double tol = std::max({2.0 * std::max(hx, hy), std::hypot(hx, hy) / 2 + 2 * r.tau(), cloud.tau()});
    std::vector<std::pair<int, int>> hits;
    for (int iy = 0; iy < r.ny(); ++iy)
      for (int ix = 0; ix < r.nx(); ++ix)
        if (r.hit(ix, iy)) hits.push_back({ix, iy});
    double bad = 0.0;
    for (int i = 0; i < std::min<int>(50, static_cast<int>(hits.size())); ++i) {
      const auto [ix, iy] = hits[uniform_below(rng, hits.size())];
      if (!membership(ifs, cloud, r.cell_center(ix, iy), r.depth(ix, iy), tol).yes()) bad += 1;
    }
    return bad;
  });

  if (s != Space::Sphere) {
    detail::run_check(rep, "manifold-metric", "d_L metric, d_X <= d_L", 1.0, [&] {
      const Manifold m(ifs, cloud);
      const std::vector<Word> leaves = enumerate_leaves(N, 2);
      const auto random_point = [&] {
        for (int tries = 0; tries < 100; ++tries) {
          const Word& t = leaves[uniform_below(rng, leaves.size())];
          try {
            const std::vector<Point> xs = m.leaf_fractional(t);
            const Point x = xs[uniform_below(rng, xs.size())];
            return ManifoldPoint{t, x, ifs.apply_word(t, x)};
          } catch (const Error&) {
          }
        }
        throw Error(ErrorCode::EmptyLeaf, "no nonempty leaf");
      };
      // violations in units of the attached slack
      double worst = 0.0;
      for (int i = 0; i < std::min(opt.samples, 50); ++i) {
        const ManifoldPoint a = random_point(), b = random_point(), c = random_point();
        const auto ab = m.distance(a, b), bc = m.distance(b, c), ac = m.distance(a, c);
        const double slack = 2.0 * std::max({ab.error_bound, bc.error_bound, ac.error_bound, 1e-300});
        worst = std::max(worst, (ac.d_L - ab.d_L - bc.d_L) / slack);
        worst = std::max(worst, (ab.d_X - ab.d_L) / slack);
      }
      return std::max(worst, 0.0);
    });
  }
  return rep;
}

}  // namespace fbe
