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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every tolerance is a named constant below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fbe/basin.hpp"
#include "fbe/coding.hpp"
#include "fbe/io.hpp"
#include "fbe/manifold.hpp"
#include "fbe/symbolic.hpp"
#include "test_support.hpp"

using namespace fbe;
using fbe::testing::meets_cantor;
using fbe::testing::spec;

namespace {

// pinned tolerances
constexpr double kCantorCell = 1.8816764231589208e-06;  // 3^-12
constexpr double kCantorMembershipTol = 0.0013717421124828531;  // 3^-6, upper bound on tol
constexpr double kCodingTol = 1e-9;
constexpr double kSemiconjugacyTol = 1e-9;
constexpr int kSemiconjugacySamples = 100;
constexpr int kSymbolicLength = 16;
constexpr int kManifoldTriples = 1000;
constexpr double kBranchPairTol = 1e-3;
constexpr double kBranchProjTol = 1e-6;
constexpr double kCircleTol = 1e-2;
constexpr double kProjectiveTol = 1e-2;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
}

template <class... T>
std::string fmt(const char* f, T... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

AttractorCloud fine_cantor() { return attractor(spec("cantor"), 400, kCantorCell); }

// 1. Cantor depth-2 raster against the ternary-digit oracle
Outcome cantor_raster() {
  const IfsSystem ifs = spec("cantor");
  const AttractorCloud c = fine_cantor();
  const Raster r = fast_basin_raster(ifs, c, Box{-3, 0, 3, 0}, 4096, 1, 2);
  // preimages of C under words of length <= 2 are 3^k C + b
  std::vector<std::pair<long double, long double>> pre{{1, 0}};
  std::vector<std::pair<long double, long double>> level = pre;
  for (int k = 0; k < 2; ++k) {
    std::vector<std::pair<long double, long double>> next;
    for (auto [a, b] : level) {
      next.push_back({3 * a, 3 * b});
      next.push_back({3 * a, 3 * b - 2});
    }
    pre.insert(pre.end(), next.begin(), next.end());
    level = next;
  }
  int mismatch = 0, hits = 0;
  for (int i = 0; i < r.nx(); ++i) {
    const long double lo = r.cell_x(i) - static_cast<long double>(r.tau());
    const long double hi = r.cell_x(i + 1) + static_cast<long double>(r.tau());
    bool want = false;
    for (auto [a, b] : pre) want = want || meets_cantor((lo - b) / a, (hi - b) / a, 60);
    hits += r.hit(i, 0);
    mismatch += want != r.hit(i, 0);
  }
  return {mismatch == 0, fmt("%d mismatched of 4096 cells, %d hits, tau=%.3g", mismatch, hits, r.tau())};
}

// 2. basin inclusion on the interval and its failure on Cantor
Outcome basin_inclusion() {
  const IfsSystem iv = spec("interval");
  const AttractorCloud ci = attractor(iv, 400, 1e-4);
  Rng rng(2);
  std::vector<Point> xs;
  for (int i = 0; i < 200; ++i) xs.push_back({uniform_real(rng, -4.0, 4.0)});
  const Address theta = parse_address("(1.2)*");
  const BasinInclusionReport rep = basin_inclusion_check(iv, ci, xs, 12, ci.tau(), theta);
  const IfsSystem cs = spec("cantor");
  const AttractorCloud cc = fine_cantor();
  const double tol = cc.tau();
  const MembershipResult half = membership(cs, cc, Point{0.5}, 8, tol);
  const bool ok = rep.theta_fraction == 1.0 && tol <= kCantorMembershipTol && !half.yes() && half.depth_searched == 8;
  return {ok, fmt("interval along theta: %.3f of 200 reached; cantor 1/2 %s at depth %d with tol %.3g", rep.theta_fraction,
                  half.yes() ? "FOUND" : "not found", half.depth_searched, tol)};
}

// 3. coding map values and canonical forms
Outcome coding_examples() {
  const IfsSystem ifs = spec("interval");
  const double a = coding_map(ifs, parse_address("(2)*")).x;
  const double b = coding_map(ifs, parse_address("-1.(2)*")).x;
  const Manifold m(ifs, attractor(ifs, 400, 1e-4));
  const ManifoldPoint p = m.canonicalize(parse_address("-1.-1.-1.(2)*"), m.tau());
  const ManifoldPoint q = m.canonicalize(parse_address("-1.-1.-2.1.(2)*"), m.tau());
  const bool ok = std::abs(a - 1) <= kCodingTol && std::abs(b - 2) <= kCodingTol && p.theta == Word{-1, -1, -1} &&
                  std::abs(p.x.x - 1) <= kCodingTol && std::abs(p.proj.x - 8) <= kCodingTol && q.theta.empty() &&
                  std::abs(q.x.x) <= kCodingTol;
  return {ok, fmt("pi=%.17g, %.17g; canon theta=%s proj=%.17g; second theta=\"%s\" x=%.3g", a, b,
                  join_digits(p.theta).c_str(), p.proj.x, join_digits(q.theta).c_str(), q.x.x)};
}

// 4. semiconjugacy residuals
Outcome semiconjugacy() {
  double worst = 0.0;
  std::size_t checks = 0;
  bool ok = true;
  for (const char* name : {"interval", "cantor", "sierpinski"}) {
    const SemiconjugacyReport r = verify_semiconjugacy(spec(name), kSemiconjugacySamples, kSemiconjugacyTol, 4);
    worst = std::max(worst, r.max_residual);
    checks += r.checks;
    ok = ok && r.passed();
  }
  return {ok, fmt("%zu checks, max residual %.3g", checks, worst)};
}

// 5. symbolic attractor convergence with exact dyadic distances
Outcome symbolic_attractor() {
  Rng rng(5);
  int cases = 0;
  std::string bad;
  for (int n : {2, 3}) {
    const std::vector<int> pos = n == 2 ? std::vector<int>{1, 2} : std::vector<int>{1, 2, 3};
    for (int s = 0; s < (n == 2 ? 12 : 4); ++s) {
      const Address iota = random_address(rng, n, AddressKind::Hat, n == 2 ? 5 : 3, 3);
      std::size_t K = 0;
      while (iota.digit(K) < 0) ++K;
      const SymbolicSet start = truncation(iota, kSymbolicLength);
      for (int j = 1; j <= 6; ++j) {
        const SymbolicSet it = iterate_symbolic_ifs(start, pos, K + static_cast<std::size_t>(j));
        ++cases;
        if (!hausdorff_to_positive(it, n).at_most_pow2(j + 1)) bad = to_string(iota) + " j=" + std::to_string(j);
      }
    }
  }
  return {bad.empty(), bad.empty() ? fmt("%d (address, j) cases within 2^-(j+1)", cases) : "violated at " + bad};
}

// random point on a random leaf of depth <= 3
struct LeafSampler {
  const Manifold& m;
  std::vector<std::pair<Word, std::vector<Point>>> leaves;
  explicit LeafSampler(const Manifold& mm) : m(mm) {
    for (Word& t : enumerate_leaves(m.ifs().size(), 3)) leaves.push_back({t, m.leaf_fractional(t)});
  }
  ManifoldPoint operator()(Rng& rng) const {
    while (true) {
      const auto& [t, xs] = leaves[uniform_below(rng, leaves.size())];
      try {
        return m.make_point(t, xs[uniform_below(rng, xs.size())]);
      } catch (const Error&) {
      }
    }
  }
};

// 6. manifold metric
Outcome manifold_metric() {
  std::ostringstream d;
  bool ok = true;
  for (const char* name : {"interval", "cantor"}) {
    const IfsSystem ifs = spec(name);
    const Manifold m(ifs, attractor(ifs, 400, name[0] == 'i' ? 1e-3 : 1e-4));
    const LeafSampler gen(m);
    Rng rng(6);
    const double eps = m.cloud().epsilon;
    int tri = 0, dom = 0, sheet = 0, same = 0;
    for (int i = 0; i < kManifoldTriples; ++i) {
      const ManifoldPoint a = gen(rng), b = gen(rng), c = gen(rng);
      const ManifoldDistance ab = m.distance(a, b), bc = m.distance(b, c), ac = m.distance(a, c);
      const double lip = std::max({m.word_lipschitz(ab.common_prefix), m.word_lipschitz(bc.common_prefix),
                                   m.word_lipschitz(ac.common_prefix)});
      tri += ac.d_L > ab.d_L + bc.d_L + 4 * lip * eps;
      dom += ab.d_X > ab.d_L + 4 * m.word_lipschitz(ab.common_prefix) * eps;
      // same sheet: b moved onto a's leaf
      const auto& xs = m.leaf_fractional(a.theta);
      const ManifoldPoint s = m.make_point(a.theta, xs[uniform_below(rng, xs.size())]);
      const ManifoldDistance as = m.distance(a, s);
      ++same;
      sheet += std::abs(as.d_L - as.d_X) > 4 * m.word_lipschitz(a.theta) * eps;
    }
    ok = ok && tri == 0 && dom == 0 && sheet == 0;
    d << name << ": triangle " << tri << ", d_X>d_L " << dom << ", sheet " << sheet << "/" << same << " violations; ";
  }
  const IfsSystem iv = spec("interval");
  const Manifold m(iv, attractor(iv, 400, 1e-4));
  const ManifoldDistance bp = m.distance(m.make_point({-1}, Point{0.75}), m.make_point({-2, -1}, Point{0.625}));
  ok = ok && std::abs(bp.d_L - 1.0) <= kBranchPairTol && bp.d_X == 0.0;
  d << fmt("branch pair d_L=%.6f d_X=%.3g", bp.d_L, bp.d_X);
  return {ok, d.str()};
}

// pull f_theta back off a leaf projection
std::vector<Point> pull_back(const IfsSystem& ifs, const Word& theta, std::vector<Point> pts) {
  Word inv(theta.rbegin(), theta.rend());
  for (int& d : inv) d = -d;
  for (Point& p : pts) p = ifs.apply_word(inv, p);
  return pts;
}

// 7. leaf shapes
Outcome leaf_classes() {
  std::ostringstream d;
  bool ok = true;
  for (const char* name : {"interval", "cantor"}) {
    const IfsSystem ifs = spec(name);
    const Manifold m(ifs, attractor(ifs, 400, name[0] == 'i' ? 1e-4 : 1e-5));
    const double eps = m.cloud().epsilon;
    std::vector<std::vector<Point>> reps;
    std::vector<int> sizes;
    for (const Word& t : enumerate_leaves(2, 4)) {
      const auto shape = pull_back(ifs, t, m.leaf_projection(t));
      bool placed = false;
      for (std::size_t k = 0; k < reps.size() && !placed; ++k)
        if (hausdorff_distance(Space::R1, reps[k], shape) <= 3 * eps) {
          ++sizes[k];
          placed = true;
        }
      if (!placed) {
        reps.push_back(shape);
        sizes.push_back(1);
      }
    }
    // name each class by its extent: whole set, upper part or lower part
    std::set<std::string> kinds;
    for (const auto& r : reps) {
      const Box b = bounding_box(r);
      kinds.insert(b.x0 < 0.25 && b.x1 > 0.75 ? (r.size() == m.cloud().points.size() ? "A" : "?")
                   : b.x0 > 0.5                ? "upper"
                   : b.x1 < 0.5                ? "lower"
                                               : "?");
    }
    ok = ok && reps.size() == 3 && kinds == std::set<std::string>{"A", "upper", "lower"};
    d << name << ": " << reps.size() << " classes (";
    for (std::size_t k = 0; k < sizes.size(); ++k) d << (k ? "," : "") << sizes[k];
    d << " leaves); ";
  }
  return {ok, d.str()};
}

// 8. branch points of the interval manifold
Outcome branch_points() {
  const IfsSystem iv = spec("interval");
  const Manifold m(iv, attractor(iv, 400, 1e-4));
  const auto bp = m.branch_points(4, 2 * m.tau());
  std::vector<double> got;
  for (const BranchPoint& b : bp) got.push_back(b.point.proj.x);
  std::sort(got.begin(), got.end());
  const std::vector<double> want{-7, -3, -1, 0, 1, 2, 4, 8};
  const auto covered = [&](const std::vector<double>& a, const std::vector<double>& b) {
    return std::all_of(a.begin(), a.end(), [&](double x) {
      return std::any_of(b.begin(), b.end(), [&](double y) { return std::abs(x - y) <= kBranchProjTol; });
    });
  };
  const bool equal = covered(want, got) && covered(got, want);
  const IfsSystem cs = spec("cantor");
  const Manifold mc(cs, attractor(cs, 400, 1e-4));
  const std::size_t cantor = mc.branch_points(4, 2 * mc.tau()).size();
  std::ostringstream d;
  d << "detected {";
  for (std::size_t i = 0; i < got.size(); ++i) d << (i ? "," : "") << got[i];
  d << "}; expected set " << (covered(want, got) ? "contained" : "NOT contained") << "; cantor " << cantor;
  return {equal && cantor == 0, d.str()};
}

// Algebraic least-squares circle through points (x, y): x^2 + y^2 + D x + E y + F = 0.
std::array<double, 3> fit_circle(const std::vector<Point>& pts) {
  double a[3][4] = {};
  for (const Point& p : pts) {
    const double row[3] = {p.x, p.y, 1.0}, rhs = -(p.x * p.x + p.y * p.y);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a[i][j] += row[i] * row[j];
      a[i][3] += row[i] * rhs;
    }
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
    }
  }
  const double D = a[0][3] / a[0][0], E = a[1][3] / a[1][1], F = a[2][3] / a[2][2];
  return {-D / 2, -E / 2, std::sqrt(D * D / 4 + E * E / 4 - F)};
}

// 9. Moebius arc
Outcome moebius_arc() {
  const IfsSystem ifs = spec("moebius_arc");
  const AttractorCloud c = attractor(ifs, 400, 1e-4);
  const auto [cx, cy, r] = fit_circle(c.points);
  const double centre_err = std::hypot(cx, cy - 1.5);
  double worst = 0.0;
  std::size_t n = 0;
  for (int len = 0; len <= 3; ++len)
    for (const Word& w : positive_words(2, static_cast<std::size_t>(len))) {
      for (const Point& p : finite_continuation(ifs, c, Address::finite(w), w.size()).points) {
        ++n;
        worst = p.infinite ? std::numeric_limits<double>::infinity()
                           : std::max(worst, std::abs(std::hypot(p.x - cx, p.y - cy) - r));
      }
    }
  const bool ok = centre_err <= kCircleTol && std::abs(r - 0.5) <= kCircleTol && worst <= kCircleTol;
  return {ok, fmt("centre (%.6f, %.6f), radius %.6f; %zu basin points, max off-circle %.3g", cx, cy, r, n, worst)};
}

// 10. projective pair and its dual
Outcome projective() {
  const IfsSystem ifs = spec("projective");
  const AttractorCloud dual = attractor(ifs.dual(), 400, 1e-4);
  std::size_t inside = 0;
  double near_l = 1e300, near_r = 1e300;
  for (const Point& p : dual.points) {
    if (p.infinite) continue;
    inside += p.x > -4.4 && p.x < 5.4;
    near_l = std::min(near_l, std::abs(p.x + 4.5));
    near_r = std::min(near_r, std::abs(p.x - 5.5));
  }
  const AttractorCloud prim = attractor(ifs, 400, 1e-4);
  std::vector<Point> grid;
  for (int i = 0; i <= 10000; ++i) grid.push_back({i / 10000.0, 0.0});
  const double span = hausdorff_distance(Space::Sphere, prim.points, grid);
  const bool ok = inside == 0 && near_l <= kProjectiveTol && near_r <= kProjectiveTol && span <= prim.epsilon + 2e-4;
  return {ok, fmt("dual: %zu points in (-4.4,5.4), gaps to -4.5/5.5 = %.3g/%.3g; primary vs [0,1] d_H=%.3g (eps %.3g)",
                  inside, near_l, near_r, span, prim.epsilon)};
}

// 11. two traversals, identical bytes
Outcome traversals() {
  std::ostringstream d;
  bool ok = true;
  for (const char* name : {"interval", "cantor", "sierpinski"}) {
    const IfsSystem ifs = spec(name);
    const bool one = ifs.space() == Space::R1;
    const AttractorCloud c = attractor(ifs, 400, one ? 1e-4 : 2e-3);
    const Box region = one ? Box{-8, 0, 8, 0} : Box{-4, -4, 5, 5};
    const int nx = one ? 4096 : 1024, ny = one ? 1 : 1024;
    const std::string a = pgm_bytes(fast_basin_raster(ifs, c, region, nx, ny, 3));
    const std::string b = pgm_bytes(continuation_union_raster(ifs, c, region, nx, ny, 3));
    ok = ok && a == b;
    d << name << (a == b ? " identical" : " DIFFERENT") << " (" << a.size() << " bytes); ";
  }
  return {ok, d.str()};
}

}  // namespace

int main() {
  report(1, "cantor fast basin vs ternary oracle", cantor_raster);
  report(2, "basin inclusion criterion", basin_inclusion);
  report(3, "coding map and canonical forms", coding_examples);
  report(4, "semiconjugacy diagrams", semiconjugacy);
  report(5, "symbolic attractor convergence", symbolic_attractor);
  report(6, "manifold metric", manifold_metric);
  report(7, "leaf classification", leaf_classes);
  report(8, "branch points", branch_points);
  report(9, "moebius arc circle", moebius_arc);
  report(10, "projective dual attractor", projective);
  report(11, "fast basin equals continuation union", traversals);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
