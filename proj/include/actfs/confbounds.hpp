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

#ifndef ACTFS_CONFBOUNDS_HPP_
#define ACTFS_CONFBOUNDS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

namespace actfs {

/// Closed bound pair on a Bernoulli parameter. 0 <= lower <= upper <= 1.
struct ConfInterval {
  double lower = 0.0;
  double upper = 1.0;

  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
  double width() const noexcept { return upper - lower; }
  friend bool operator==(const ConfInterval&, const ConfInterval&) = default;
};

enum class BoundFamily { Hoeffding, Bernstein, ClopperPearson };

inline std::string_view to_string(BoundFamily f) {
  switch (f) {
    case BoundFamily::Hoeffding: return "H";
    case BoundFamily::Bernstein: return "B";
    case BoundFamily::ClopperPearson: return "CP";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Shaped functions of a Bernoulli parameter. Natural log throughout, with
// 0 log(1/0) taken as 0.

inline double binary_entropy(double q) noexcept {
  if (q <= 0.0 || q >= 1.0) return 0.0;
  return -q * std::log(q) - (1.0 - q) * std::log1p(-q);
}

/// Sum in ascending order, so equal multisets of terms give bitwise-equal sums.
inline double ordered_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  return std::accumulate(terms.begin(), terms.end(), 0.0);
}

inline double fvar(double q) noexcept { return q * (1.0 - q); }

/// sqrt(x(1-x)) |log(x/(1-x))|: the first-order standard deviation of H_b(q^).
inline double gshape(double x) noexcept {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::sqrt(x * (1.0 - x)) * std::abs(std::log(x) - std::log1p(-x));
}

namespace detail {

inline double solve_phi() {
  // sign(g'(x)) on (0, 1/2) is sign((1 - 2x) log((1 - x)/x) - 2)
  auto h = [](double x) { return (1.0 - 2.0 * x) * (std::log1p(-x) - std::log(x)) - 2.0; };
  double lo = 1e-12;
  double hi = 0.5;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Interior maximiser of gshape on (0, 1/2); about 0.0832.
inline double phi() {
  static const double value = detail::solve_phi();
  return value;
}

// ---------------------------------------------------------------------------
// Binomial tails and confidence intervals.

/// P[Bin(n, q) <= s], through the identity with the regularised incomplete
/// beta function.
inline double binomial_cdf(std::uint32_t s, std::uint32_t n, double q) {
  if (s >= n) return 1.0;
  if (q <= 0.0) return 1.0;
  if (q >= 1.0) return 0.0;
  return boost::math::ibetac(s + 1.0, static_cast<double>(n - s), q);
}

/// P[Bin(n, q) >= s].
inline double binomial_sf(std::uint32_t s, std::uint32_t n, double q) {
  if (s == 0) return 1.0;
  if (s > n) return 0.0;
  if (q <= 0.0) return 0.0;
  if (q >= 1.0) return 1.0;
  return boost::math::ibeta(static_cast<double>(s), n - s + 1.0, q);
}

namespace detail {

// Bisection for the crossing of a monotone predicate, to width 1e-10.
template <typename Pred>
double bisect_first_true(double lo, double hi, Pred above) {
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (above(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// As above, but starts from [guess - 1e-10, guess + 1e-10] when the predicate
// confirms that the crossing lies inside it.
template <typename Pred>
double bisect_from_guess(double lo, double hi, double guess, Pred above) {
  const double a = std::max(lo, guess - 1e-10);
  const double b = std::min(hi, guess + 1e-10);
  if ((a == lo || !above(a)) && above(b)) return bisect_first_true(a, b, above);
  return bisect_first_true(lo, hi, above);
}

inline ConfInterval clopper_pearson(std::uint32_t s, std::uint32_t n, double delta) {
  const double target = 0.5 * delta;
  const double phat = static_cast<double>(s) / n;
  ConfInterval iv;
  // lower: inf{q : P[X >= s] > delta/2}; the tail is increasing in q
  if (s > 0) {
    const double guess = boost::math::ibeta_inv(static_cast<double>(s), n - s + 1.0, target);
    iv.lower = bisect_from_guess(0.0, phat, guess, [&](double q) { return binomial_sf(s, n, q) > target; });
  }
  // upper: sup{q : P[X <= s] > delta/2}; the cdf is decreasing in q
  if (s < n) {
    const double guess = boost::math::ibetac_inv(s + 1.0, static_cast<double>(n - s), target);
    iv.upper = bisect_from_guess(phat, 1.0, guess, [&](double q) { return binomial_cdf(s, n, q) <= target; });
  }
  iv.lower = std::min(iv.lower, phat);
  iv.upper = std::max(iv.upper, phat);
  return iv;
}

}  // namespace detail

/// Two-sided interval for a Bernoulli parameter from `successes` out of `n`
/// draws at confidence level 1 - delta. n = 0 gives (0, 1).
inline ConfInterval interval(BoundFamily family, std::uint32_t successes, std::uint32_t n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("interval: delta must lie in (0, 1)");
  if (successes > n) throw std::invalid_argument("interval: successes exceed trials");
  if (n == 0) return {0.0, 1.0};
  const double phat = static_cast<double>(successes) / n;
  const double nd = static_cast<double>(n);
  double rad = 0.0;
  switch (family) {
    case BoundFamily::Hoeffding:
      rad = std::sqrt(std::log(2.0 / delta) / (2.0 * nd));
      break;
    case BoundFamily::Bernstein: {
      const double l3 = std::log(3.0 / delta);
      rad = std::sqrt(2.0 * phat * (1.0 - phat) * l3 / nd) + 3.0 * l3 / nd;
      break;
    }
    case BoundFamily::ClopperPearson:
      return detail::clopper_pearson(successes, n, delta);
  }
  return {std::max(0.0, phat - rad), std::min(1.0, phat + rad)};
}

/// Memoised `interval`. Clopper-Pearson roots cost O(n) per bisection step
/// and the same (s, n) pairs recur constantly inside allocation loops.
class IntervalCache {
 public:
  IntervalCache(BoundFamily family, double delta) : family_(family), delta_(delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("IntervalCache: delta must lie in (0, 1)");
  }

  BoundFamily family() const noexcept { return family_; }
  double delta() const noexcept { return delta_; }

  ConfInterval operator()(std::uint32_t successes, std::uint32_t n) {
    if (family_ != BoundFamily::ClopperPearson || n == 0) return interval(family_, successes, n, delta_);
    const std::uint64_t key = (static_cast<std::uint64_t>(n) << 32) | successes;
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const ConfInterval iv = interval(family_, successes, n, delta_);
    memo_.emplace(key, iv);
    return iv;
  }

 private:
  BoundFamily family_;
  double delta_;
  std::unordered_map<std::uint64_t, ConfInterval> memo_;
};

// ---------------------------------------------------------------------------
// Confidence envelopes of shaped functions over an interval.

enum class Shape { Hb, Fvar, G };

inline double evaluate(Shape shape, double x) noexcept {
  switch (shape) {
    case Shape::Hb: return binary_entropy(x);
    case Shape::Fvar: return fvar(x);
    case Shape::G: return gshape(x);
  }
  return 0.0;
}

/// max over [iv.lower, iv.upper] of the shape.
inline double ucb_shaped(Shape shape, const ConfInterval& iv) {
  if (shape == Shape::G) {
    const double f = phi();
    if (iv.contains(f) || iv.contains(1.0 - f)) return gshape(f);
    return std::max(gshape(iv.lower), gshape(iv.upper));
  }
  // unimodal with the mode at 1/2
  if (iv.contains(0.5)) return evaluate(shape, 0.5);
  if (iv.lower > 0.5) return evaluate(shape, iv.lower);
  return evaluate(shape, iv.upper);
}

/// min over the interval of H_b, attained at an endpoint since H_b is concave.
inline double lcb_hb(const ConfInterval& iv) {
  return std::min(binary_entropy(iv.lower), binary_entropy(iv.upper));
}

}  // namespace actfs

#endif  // ACTFS_CONFBOUNDS_HPP_
