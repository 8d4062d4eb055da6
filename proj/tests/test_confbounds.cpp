// Copyright 2026 The actfs Authors
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

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "actfs/confbounds.hpp"
#include "test_util.hpp"

namespace actfs {
namespace {

using testing::uniform;

constexpr BoundFamily kFamilies[] = {BoundFamily::Hoeffding, BoundFamily::Bernstein, BoundFamily::ClopperPearson};
constexpr Shape kShapes[] = {Shape::Hb, Shape::Fvar, Shape::G};

// Direct binomial sum, no shared code with the library.
double brute_cdf(int s, int n, double q) {
  double total = 0.0;
  for (int i = 0; i <= s; ++i) {
    double c = 1.0;
    for (int r = 1; r <= i; ++r) c = c * (n - i + r) / r;
    total += c * std::pow(q, i) * std::pow(1.0 - q, n - i);
  }
  return total;
}

ConfInterval brute_cp(int s, int n, double delta) {
  auto root = [](auto pred) {  // pred false on the left, true on the right
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (pred(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };
  ConfInterval iv;
  // P[Bin >= s] = 1 - cdf(s - 1) increases in q
  iv.lower = s == 0 ? 0.0 : root([&](double q) { return 1.0 - brute_cdf(s - 1, n, q) > delta / 2; });
  // P[Bin <= s] decreases in q
  iv.upper = s == n ? 1.0 : root([&](double q) { return brute_cdf(s, n, q) <= delta / 2; });
  return iv;
}

std::pair<double, double> grid_extrema(Shape shape, const ConfInterval& iv, int points = 10000) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < points; ++i) {
    const double x = iv.lower + (iv.upper - iv.lower) * i / (points - 1);
    const double y = evaluate(shape, x);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  return {lo, hi};
}

ConfInterval random_interval(Rng& rng) {
  double a = uniform01(rng), b = uniform01(rng);
  switch (uniform_index(rng, 5)) {
    case 0: a = 0.0; break;
    case 1: b = 1.0; break;
    case 2: b = a; break;
    default: break;
  }
  if (a > b) std::swap(a, b);
  return {a, b};
}

TEST(BinaryEntropy, NaturalLog) {
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), std::log(2.0));
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.2), 0.5004024235, 1e-10);
}

TEST(Gshape, BoundaryAndSymmetry) {
  EXPECT_NEAR(gshape(1e-12), 0.0, 1e-4);
  EXPECT_NEAR(gshape(1.0 - 1e-12), 0.0, 1e-4);
  EXPECT_EQ(gshape(0.0), 0.0);
  EXPECT_EQ(gshape(1.0), 0.0);
  EXPECT_EQ(gshape(0.5), 0.0);
  for (int i = 1; i < 1000; ++i) {
    const double x = i / 1000.0;
    EXPECT_NEAR(gshape(x), gshape(1.0 - x), 1e-12) << x;
  }
}

TEST(Gshape, PhiIsTheInteriorPeak) {
  const double f = phi();
  EXPECT_NEAR(f, 0.0832, 5e-4);
  // central difference of g vanishes at phi
  const double h = 1e-6;
  EXPECT_NEAR((gshape(f + h) - gshape(f - h)) / (2 * h), 0.0, 1e-5);
  const auto [lo, hi] = grid_extrema(Shape::G, {0.0, 0.5}, 200001);
  EXPECT_NEAR(gshape(f), hi, 1e-9);
  EXPECT_NEAR(gshape(f), 0.6627, 1e-4);
}

TEST(Interval, EmptySampleIsUnitInterval) {
  for (auto f : kFamilies) EXPECT_EQ(interval(f, 0, 0, 0.05), (ConfInterval{0.0, 1.0}));
}

TEST(Interval, HoeffdingClosedForm) {
  const auto iv = interval(BoundFamily::Hoeffding, 5, 10, 0.05);
  const double r = std::sqrt(std::log(40.0) / 20.0);
  EXPECT_NEAR(r, 0.4294694083, 1e-9);
  EXPECT_NEAR(iv.lower, 0.5 - r, 1e-12);
  EXPECT_NEAR(iv.upper, 0.5 + r, 1e-12);
  EXPECT_NEAR(iv.lower, 0.07053, 1e-5);
  const auto clipped = interval(BoundFamily::Hoeffding, 0, 10, 0.05);
  EXPECT_EQ(clipped.lower, 0.0);
  EXPECT_NEAR(clipped.upper, r, 1e-12);
}

TEST(Interval, BernsteinClosedForm) {
  const double q = 0.3, n = 400, l3 = std::log(3.0 / 0.1);
  const double r = std::sqrt(2 * q * (1 - q) * l3 / n) + 3 * l3 / n;
  const auto iv = interval(BoundFamily::Bernstein, 120, 400, 0.1);
  EXPECT_NEAR(iv.lower, q - r, 1e-12);
  EXPECT_NEAR(iv.upper, q + r, 1e-12);
}

TEST(Interval, ClopperPearsonZeroSuccesses) {
  const auto iv = interval(BoundFamily::ClopperPearson, 0, 10, 0.05);
  EXPECT_EQ(iv.lower, 0.0);
  EXPECT_NEAR(iv.upper, 1.0 - std::pow(0.025, 0.1), 1e-12);
  EXPECT_NEAR(iv.upper, 0.30850, 1e-5);
}

TEST(Interval, ClopperPearsonGolden) {
  // Recorded from an external beta-quantile implementation.
  const auto iv = interval(BoundFamily::ClopperPearson, 3, 10, 0.05);
  EXPECT_NEAR(iv.lower, 0.0667395111777345, 1e-9);
  EXPECT_NEAR(iv.upper, 0.652452850059997, 1e-9);
  const auto brute = brute_cp(3, 10, 0.05);
  EXPECT_NEAR(iv.lower, brute.lower, 1e-9);
  EXPECT_NEAR(iv.upper, brute.upper, 1e-9);
}

TEST(Interval, RejectsBadArguments) {
  for (auto f : kFamilies) {
    EXPECT_THROW(interval(f, 1, 2, 0.0), std::invalid_argument);
    EXPECT_THROW(interval(f, 1, 2, 1.0), std::invalid_argument);
    EXPECT_THROW(interval(f, 1, 2, std::nan("")), std::invalid_argument);
    EXPECT_THROW(interval(f, 3, 2, 0.05), std::invalid_argument);
  }
}

TEST(Interval, BinomialTailsMatchDirectSum) {
  for (int n : {1, 5, 17, 40})
    for (int s = 0; s <= n; ++s)
      for (double q : {0.01, 0.2, 0.5, 0.77, 0.999}) {
        EXPECT_NEAR(binomial_cdf(s, n, q), brute_cdf(s, n, q), 1e-12);
        EXPECT_NEAR(binomial_sf(s, n, q), 1.0 - (s ? brute_cdf(s - 1, n, q) : 0.0), 1e-12);
      }
}

TEST(ConfboundsProperty, ClopperPearsonMatchesBetaQuantiles) {
  Rng rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto n = static_cast<std::uint32_t>(1 + uniform_index(rng, 400));
    const auto s = static_cast<std::uint32_t>(uniform_index(rng, n + 1));
    const double delta = uniform(rng, 1e-4, 0.5);
    const auto iv = interval(BoundFamily::ClopperPearson, s, n, delta);
    const double lo = s == 0 ? 0.0 : boost::math::ibeta_inv(double(s), double(n - s + 1), delta / 2);
    const double hi = s == n ? 1.0 : boost::math::ibeta_inv(double(s + 1), double(n - s), 1.0 - delta / 2);
    ASSERT_NEAR(iv.lower, lo, 1e-9) << s << "/" << n << " delta " << delta;
    ASSERT_NEAR(iv.upper, hi, 1e-9) << s << "/" << n << " delta " << delta;
  }
}

TEST(ConfboundsProperty, ClopperPearsonMatchesBruteForce) {
  Rng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 30));
    const int s = static_cast<int>(uniform_index(rng, n + 1));
    const double delta = uniform(rng, 0.01, 0.3);
    const auto iv = interval(BoundFamily::ClopperPearson, s, n, delta);
    const auto ref = brute_cp(s, n, delta);
    ASSERT_NEAR(iv.lower, ref.lower, 1e-9);
    ASSERT_NEAR(iv.upper, ref.upper, 1e-9);
  }
}

TEST(ConfboundsProperty, IntervalsNestedAndContainEstimate) {
  Rng rng(13);
  int cases = 0;
  for (std::uint32_t n = 1; n <= 60; ++n)
    for (std::uint32_t s = 0; s <= n; ++s) {
      const double delta = uniform(rng, 1e-6, 0.999);
      for (auto f : kFamilies) {
        const auto iv = interval(f, s, n, delta);
        ASSERT_LE(0.0, iv.lower);
        ASSERT_LE(iv.lower, iv.upper);
        ASSERT_LE(iv.upper, 1.0);
        ASSERT_TRUE(iv.contains(double(s) / n)) << to_string(f) << " " << s << "/" << n;
        ++cases;
      }
    }
  EXPECT_GE(cases, 1000);
}

TEST(ConfboundsProperty, SmallerDeltaNeverNarrows) {
  Rng rng(14);
  for (int trial = 0; trial < 1500; ++trial) {
    const auto n = static_cast<std::uint32_t>(1 + uniform_index(rng, 200));
    const auto s = static_cast<std::uint32_t>(uniform_index(rng, n + 1));
    double d1 = uniform(rng, 1e-5, 0.99), d2 = uniform(rng, 1e-5, 0.99);
    if (d1 > d2) std::swap(d1, d2);
    for (auto f : kFamilies) {
      const auto wide = interval(f, s, n, d1);
      const auto narrow = interval(f, s, n, d2);
      ASSERT_LE(wide.lower, narrow.lower + 1e-12) << to_string(f);
      ASSERT_GE(wide.upper, narrow.upper - 1e-12) << to_string(f);
    }
  }
}

TEST(ConfboundsProperty, CacheAgreesWithDirectEvaluation) {
  Rng rng(15);
  for (auto f : kFamilies) {
    IntervalCache cache(f, 0.07);
    for (int trial = 0; trial < 1000; ++trial) {
      const auto n = static_cast<std::uint32_t>(uniform_index(rng, 80));
      const auto s = static_cast<std::uint32_t>(uniform_index(rng, n + 1));
      ASSERT_EQ(cache(s, n), interval(f, s, n, 0.07));
    }
  }
}

TEST(ConfboundsProperty, ClopperPearsonCoverage) {
  // smaller twin of the acceptance check
  for (double q : {0.1, 0.5}) {
    Rng rng(16);
    IntervalCache cache(BoundFamily::ClopperPearson, 0.05);
    int covered = 0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
      std::uint32_t s = 0;
      for (int i = 0; i < 20; ++i) s += bernoulli(rng, q);
      covered += cache(s, 20).contains(q);
    }
    EXPECT_GE(double(covered) / trials, 0.94) << q;
  }
}

TEST(Envelope, Examples) {
  EXPECT_NEAR(ucb_shaped(Shape::Hb, {0.3, 0.7}), std::log(2.0), 1e-15);
  EXPECT_NEAR(ucb_shaped(Shape::Fvar, {0.0, 0.2}), 0.16, 1e-15);
  EXPECT_NEAR(ucb_shaped(Shape::G, {0.05, 0.12}), gshape(phi()), 1e-15);
  EXPECT_NEAR(ucb_shaped(Shape::G, {0.05, 0.12}), grid_extrema(Shape::G, {0.05, 0.12}, 70001).second, 1e-9);
  EXPECT_NEAR(ucb_shaped(Shape::G, {0.05, 0.12}), 0.6627, 1e-4);
  EXPECT_EQ(lcb_hb({0.0, 1.0}), 0.0);
  EXPECT_NEAR(lcb_hb({0.5, 0.5}), std::log(2.0), 1e-15);
  EXPECT_NEAR(lcb_hb({0.2, 0.4}), binary_entropy(0.2), 1e-15);
  EXPECT_NEAR(lcb_hb({0.2, 0.4}), 0.5004, 1e-4);
}

TEST(Envelope, GMirroredPeak) {
  const double f = phi();
  EXPECT_NEAR(ucb_shaped(Shape::G, {0.9, 0.95}), gshape(1.0 - f), 1e-15);
  EXPECT_NEAR(ucb_shaped(Shape::G, {0.2, 0.6}), gshape(0.2), 1e-15);
  EXPECT_NEAR(ucb_shaped(Shape::G, {0.0, 0.01}), gshape(0.01), 1e-15);
}

TEST(ConfboundsProperty, EnvelopesMatchGridSearch) {
  Rng rng(17);
  for (auto shape : kShapes) {
    for (int trial = 0; trial < 1000; ++trial) {
      const auto iv = random_interval(rng);
      const auto [lo, hi] = grid_extrema(shape, iv);
      const double ucb = ucb_shaped(shape, iv);
      ASSERT_GE(ucb, hi - 1e-12) << iv.lower << " " << iv.upper;
      ASSERT_LE(ucb - hi, 1e-6) << iv.lower << " " << iv.upper;
      if (shape == Shape::Hb) {
        const double lcb = lcb_hb(iv);
        ASSERT_LE(lcb, lo + 1e-6);
        ASSERT_GE(lcb, lo - 1e-12);
      }
    }
  }
}

}  // namespace
}  // namespace actfs
