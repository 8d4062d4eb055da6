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

#ifndef ACTFS_STATS_HPP_
#define ACTFS_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace actfs {

/// Quantile of Student's t with `dof` degrees of freedom.
inline double student_t_quantile(double prob, double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("student_t_quantile: dof must be positive");
  return boost::math::quantile(boost::math::students_t_distribution<double>(dof), prob);
}

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;
  double lower() const noexcept { return mean - half_width; }
  double upper() const noexcept { return mean + half_width; }
};

/// Mean with a two-sided Student-t interval at level `level`: the half width
/// is t_{(1+level)/2, R-1} * sd / sqrt(R), sd the sample standard deviation.
/// Summation runs in index order so the result is reproducible.
inline MeanCi mean_ci(std::span<const double> xs, double level = 0.95) {
  const std::size_t r = xs.size();
  if (r < 2) throw std::invalid_argument("mean_ci: need at least two replicates");
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(r);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(r - 1));
  const double t = student_t_quantile(0.5 + 0.5 * level, static_cast<double>(r - 1));
  return {mean, t * sd / std::sqrt(static_cast<double>(r))};
}

struct WinFlags {
  bool win = false;
  bool clear_win = false;
};

/// Lower-is-better comparison of intervals: i wins if its lower edge is at
/// most every competitor's upper edge, and wins clearly if its upper edge is
/// at most every competitor's lower edge.
inline std::vector<WinFlags> win_flags(std::span<const MeanCi> cis) {
  std::vector<WinFlags> out(cis.size());
  for (std::size_t i = 0; i < cis.size(); ++i) {
    double min_upper = std::numeric_limits<double>::infinity();
    double min_lower = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cis.size(); ++j) {
      if (j == i) continue;
      min_upper = std::min(min_upper, cis[j].upper());
      min_lower = std::min(min_lower, cis[j].lower());
    }
    out[i].win = cis[i].lower() <= min_upper;
    out[i].clear_win = cis[i].upper() <= min_lower;
  }
  return out;
}

}  // namespace actfs

#endif  // ACTFS_STATS_HPP_
