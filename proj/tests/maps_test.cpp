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

#include <gtest/gtest.h>

#include "fbe/ifs.hpp"
#include "fbe/random.hpp"
#include "test_support.hpp"

namespace fbe {
namespace {

using testing::spec;

Point random_plane(Rng& rng, double r = 4.0) { return Point{uniform_real(rng, -r, r), uniform_real(rng, -r, r)}; }

TEST(Affine, InverseRoundTrip) {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const AffineMap f = AffineMap::planar(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1), uniform_real(rng, -1, 1),
                                          uniform_real(rng, -1, 1), uniform_real(rng, -2, 2), uniform_real(rng, -2, 2));
    if (std::abs(f.det()) < 1e-3) continue;
    const Point p = random_plane(rng);
    const Point q = f.inverse().apply(f.apply(p));
    EXPECT_NEAR(q.x, p.x, 1e-9);
    EXPECT_NEAR(q.y, p.y, 1e-9);
  }
}

TEST(Affine, OperatorNormIsLargestStretch) {
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const AffineMap f = AffineMap::planar(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1), uniform_real(rng, -1, 1),
                                          uniform_real(rng, -1, 1), 0, 0);
    double best = 0.0;  // dense sweep of unit directions
    for (int k = 0; k < 20000; ++k) {
      const double t = 2 * M_PI * k / 20000;
      const Point q = f.apply(Point{std::cos(t), std::sin(t)});
      best = std::max(best, std::hypot(q.x, q.y));
    }
    EXPECT_GE(f.operator_norm() + 1e-12, best);
    EXPECT_NEAR(f.operator_norm(), best, 1e-6);
  }
}

TEST(Affine, ScalarInverse) {
  const AffineMap f = AffineMap::scalar(1.0 / 3, 2.0 / 3);
  EXPECT_NEAR(f.inverse().apply(Point{1.0}).x, 1.0, 1e-15);
  EXPECT_EQ(f.operator_norm(), 1.0 / 3);
}

TEST(Moebius, NormalizedHasUnitDeterminant) {
  const MoebiusMap m = MoebiusMap{{9, 0}, {0, 0}, {-2, 0}, {20, 0}}.normalized();
  EXPECT_NEAR(std::abs(m.det() - Complex(1.0)), 0.0, 1e-15);
}

TEST(Moebius, PoleAndInfinity) {
  const MoebiusMap m = MoebiusMap{{9, 0}, {0, 0}, {-2, 0}, {20, 0}}.normalized();
  EXPECT_TRUE(m.apply(Point{10.0, 0.0}).infinite);
  const Point w = m.apply(infinity());
  EXPECT_NEAR(w.x, -4.5, 1e-14);
  EXPECT_NEAR(w.y, 0.0, 1e-14);
}

TEST(Moebius, ChordalDerivativeMatchesFiniteDifference) {
  Rng rng(3);
  const IfsSystem ifs = spec("schottky");
  for (int i = 0; i < 300; ++i) {
    const auto& m = std::get<MoebiusMap>(ifs.map(1 + static_cast<int>(uniform_below(rng, 2))));
    const Point p = random_plane(rng, 3.0);
    const double h = 1e-6;
    const double t = uniform_real(rng, 0, 2 * M_PI);
    const Point q{p.x + h * std::cos(t), p.y + h * std::sin(t)};
    const double ratio = distance(Space::Sphere, m.apply(p), m.apply(q)) / distance(Space::Sphere, p, q);
    EXPECT_NEAR(ratio, m.chordal_derivative(p), 1e-4 * std::max(1.0, ratio));
  }
}

TEST(Moebius, GlobalLipschitzBoundsSamples) {
  const IfsSystem ifs = spec("projective");
  Rng rng(4);
  for (int k = 1; k <= 2; ++k) {
    const auto& m = std::get<MoebiusMap>(ifs.map(k));
    double best = m.chordal_derivative(infinity());
    for (int i = 0; i < 20000; ++i) best = std::max(best, m.chordal_derivative(random_plane(rng, 30.0)));
    // real coefficients: the peak sits on the real line
    for (int i = -300000; i <= 300000; ++i) best = std::max(best, m.chordal_derivative(Point{i * 1e-4, 0.0}));
    EXPECT_LE(best, m.global_lipschitz() * (1 + 1e-12));
    EXPECT_GT(best, 0.99 * m.global_lipschitz());
  }
}

TEST(Moebius, InverseRoundTripOnSphere) {
  const IfsSystem ifs = spec("schottky");
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const Point p = random_plane(rng);
    for (int k : {1, 2, -1, -2}) {
      const Point q = ifs.apply(-k, ifs.apply(k, p));
      EXPECT_LT(distance(Space::Sphere, p, q), 1e-12);
    }
  }
}

TEST(Ifs, WordAppliesLastDigitFirst) {
  const IfsSystem ifs = spec("cantor");
  const Word w{1, 2};
  // f_1(f_2(0)) = (0 + 2) / 9
  EXPECT_NEAR(ifs.apply_word(w, Point{0.0}).x, 2.0 / 9, 1e-16);
}

TEST(Ifs, DualSwapsMapsAndInverses) {
  const IfsSystem ifs = spec("sierpinski");
  const IfsSystem dual = ifs.dual();
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    const Point p = random_plane(rng);
    for (int k = 1; k <= 3; ++k) {
      EXPECT_EQ(dual.apply(k, p), ifs.apply(-k, p));
      EXPECT_EQ(dual.dual().apply(k, p), ifs.apply(k, p));
    }
  }
}

TEST(Ifs, AttractingFixedPointsOfSchottky) {
  const IfsSystem ifs = spec("schottky");
  const auto seed = ifs.default_seed();
  ASSERT_EQ(seed.size(), 2u);
  EXPECT_NEAR(seed[0].x, 1.0, 1e-12);
  EXPECT_NEAR(seed[1].x, -1.0, 1e-12);
  EXPECT_NEAR(std::get<MoebiusMap>(ifs.map(1)).chordal_derivative(seed[0]), 0.1, 1e-12);
}

TEST(Ifs, RejectsSingularMap) {
  try {
    IfsSystem(Space::R1, {AffineMap::scalar(0.5, 0.0), AffineMap::scalar(0.0, 1.0)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonInvertible);
    EXPECT_NE(std::string(e.what()).find("map 2"), std::string::npos);
  }
}

TEST(Ifs, RejectsMixedFamilies) {
  EXPECT_THROW(IfsSystem(Space::R2, {AffineMap::scalar(0.5, 0.0)}), Error);
  EXPECT_THROW(IfsSystem(Space::R1, {MoebiusMap{{1, 0}, {0, 0}, {0, 0}, {2, 0}}}), Error);
}

TEST(Ifs, HashIsStable) {
  const IfsSystem a = spec("cantor"), b = spec("cantor"), c = spec("interval");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash().size(), 16u);
}

TEST(Lipschitz, PoleInRegion) {
  const IfsSystem ifs = spec("projective");
  try {
    lipschitz_bound(ifs, 1, Box{5, -1, 15, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnboundedDerivative);
  }
  const LipschitzBound ok = lipschitz_bound(ifs, 1, Box{0, 0, 1, 0});
  EXPECT_TRUE(ok.estimate);
  EXPECT_LT(ok.value, 1.0);
}

TEST(Lipschitz, AffineIsExact) {
  const LipschitzBound b = lipschitz_bound(spec("sierpinski"), 2, Box{0, 0, 1, 1});
  EXPECT_FALSE(b.estimate);
  EXPECT_EQ(b.value, 0.5);
}

}  // namespace
}  // namespace fbe
