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

#ifndef ACTFS_SINGLE_FEATURE_HPP_
#define ACTFS_SINGLE_FEATURE_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "actfs/confbounds.hpp"
#include "actfs/random.hpp"

namespace actfs {

/// What the static allocation tries to minimise.
enum class Objective {
  Prop,      // labels proportional to p_v
  MaxLinf,   // max_v |q_v - q^_v|, ignores p_v
  Variance,  // Var(sum_v p_v q^_v)
  Entropy,   // Var(H^) to first order
};

/// An allocation rule: objective plus the bound family feeding its UCBs.
struct Strategy {
  Objective objective = Objective::Entropy;
  BoundFamily family = BoundFamily::ClopperPearson;

  std::string name() const {
    switch (objective) {
      case Objective::Prop: return "PROP";
      case Objective::MaxLinf: return "MAX-" + std::string(to_string(family));
      case Objective::Variance: return "VAR-" + std::string(to_string(family));
      case Objective::Entropy: return "I-" + std::string(to_string(family));
    }
    return "?";
  }
  friend bool operator==(const Strategy&, const Strategy&) = default;
};

/// PROP, MAX-H, MAX-B, VAR-H, VAR-B, VAR-CP, I-H, I-B, I-CP.
inline std::vector<Strategy> standard_strategies() {
  using enum BoundFamily;
  return {{Objective::Prop, ClopperPearson}, {Objective::MaxLinf, Hoeffding}, {Objective::MaxLinf, Bernstein},
          {Objective::Variance, Hoeffding},  {Objective::Variance, Bernstein}, {Objective::Variance, ClopperPearson},
          {Objective::Entropy, Hoeffding},   {Objective::Entropy, Bernstein},  {Objective::Entropy, ClopperPearson}};
}

inline std::optional<Strategy> parse_strategy(const std::string& name) {
  for (const auto& s : standard_strategies())
    if (s.name() == name) return s;
  return std::nullopt;
}

/// Per-value label counts, positives and confidence intervals of one feature.
class AllocationState {
 public:
  AllocationState() = default;
  explicit AllocationState(std::size_t values) : n_(values, 0), s_(values, 0), iv_(values) {}

  std::size_t values() const noexcept { return n_.size(); }
  std::uint32_t count(std::size_t v) const { return n_[v]; }
  std::uint32_t positives(std::size_t v) const { return s_[v]; }
  double estimate(std::size_t v) const { return n_[v] ? static_cast<double>(s_[v]) / n_[v] : 0.0; }
  const ConfInterval& interval(std::size_t v) const { return iv_[v]; }
  std::size_t total() const noexcept { return total_; }

  void record(std::size_t v, int label, IntervalCache& bounds) {
    ++n_[v];
    s_[v] += (label != 0);
    ++total_;
    iv_[v] = bounds(s_[v], n_[v]);
  }

  /// Overwrites the statistics of one value, e.g. to replay a saved state.
  void assign(std::size_t v, std::uint32_t n, std::uint32_t s, const ConfInterval& iv) {
    if (s > n) throw std::invalid_argument("AllocationState: more positives than labels");
    total_ = total_ - n_[v] + n;
    n_[v] = n;
    s_[v] = s;
    iv_[v] = iv;
  }

 private:
  std::vector<std::uint32_t> n_;
  std::vector<std::uint32_t> s_;
  std::vector<ConfInterval> iv_;
  std::size_t total_ = 0;
};

/// Estimated static allocation for `obj`. Values with p_v = 0 get weight 0;
/// an all-zero vector falls back to PROP.
inline std::vector<double> weights(Objective obj, std::span<const double> p, const AllocationState& st) {
  if (p.empty()) throw std::invalid_argument("weights: empty alphabet");
  std::vector<double> w(p.size(), 0.0);
  double total = 0.0;
  for (std::size_t v = 0; v < p.size(); ++v) {
    if (p[v] <= 0.0) continue;
    switch (obj) {
      case Objective::Prop: w[v] = p[v]; break;
      case Objective::MaxLinf: w[v] = ucb_shaped(Shape::Fvar, st.interval(v)); break;
      case Objective::Variance: w[v] = p[v] * std::sqrt(ucb_shaped(Shape::Fvar, st.interval(v))); break;
      case Objective::Entropy: w[v] = p[v] * ucb_shaped(Shape::G, st.interval(v)); break;
    }
    total += w[v];
  }
  if (total <= 0.0) {
    if (obj == Objective::Prop) throw std::invalid_argument("weights: no value with positive probability");
    return weights(Objective::Prop, p, st);
  }
  for (double& x : w) x /= total;
  return w;
}

/// argmax_v w(v)/n(v) over values with p_v > 0; n(v) = 0 ranks first, ties go
/// to the lowest index.
inline std::size_t select_value(std::span<const double> w, std::span<const double> p, const AllocationState& st) {
  std::size_t best = p.size();
  double best_priority = -1.0;
  for (std::size_t v = 0; v < p.size(); ++v) {
    if (p[v] <= 0.0) continue;
    const double pr = st.count(v) == 0 ? std::numeric_limits<double>::infinity() : w[v] / st.count(v);
    if (pr > best_priority) {
      best = v;
      best_priority = pr;
    }
  }
  if (best == p.size()) throw std::invalid_argument("select_value: no value with positive probability");
  return best;
}

/// Plug-in conditional entropy sum_v p_v H_b(q^_v).
inline double estimate_entropy(std::span<const double> p, const AllocationState& st) {
  std::vector<double> terms(p.size());
  for (std::size_t v = 0; v < p.size(); ++v) terms[v] = p[v] * binary_entropy(st.estimate(v));
  return ordered_sum(std::move(terms));
}

/// sum_v p_v H_b(q_v).
inline double conditional_entropy(std::span<const double> p, std::span<const double> q) {
  std::vector<double> terms(p.size());
  for (std::size_t v = 0; v < p.size(); ++v) terms[v] = p[v] * binary_entropy(q[v]);
  return ordered_sum(std::move(terms));
}

/// Source of Y | X(j) = v draws for the single-feature problem.
class BernoulliSampler {
 public:
  BernoulliSampler(std::vector<double> q, std::uint64_t seed) : q_(std::move(q)), rng_(seed) {}
  int operator()(std::size_t v) { return bernoulli(rng_, q_.at(v)); }

 private:
  std::vector<double> q_;
  Rng rng_;
};

struct SingleFeatureResult {
  double entropy = 0.0;
  AllocationState state;
  std::vector<std::size_t> picks;  // value chosen at each step
};

/// Spends `budget` draws on the values of one feature under `strategy` and
/// returns the plug-in estimate. `sampler(v)` yields one label of Y | X = v.
template <typename Sampler>
SingleFeatureResult run_single_feature(std::span<const double> p, Sampler&& sampler, std::size_t budget,
                                       Strategy strategy, IntervalCache& bounds, bool keep_picks = false) {
  if (budget == 0) throw std::invalid_argument("run_single_feature: budget must be positive");
  if (bounds.family() != strategy.family && strategy.objective != Objective::Prop)
    throw std::invalid_argument("run_single_feature: interval cache built for another bound family");
  SingleFeatureResult out{0.0, AllocationState(p.size()), {}};
  if (keep_picks) out.picks.reserve(budget);
  for (std::size_t t = 0; t < budget; ++t) {
    const auto w = weights(strategy.objective, p, out.state);
    const std::size_t v = select_value(w, p, out.state);
    out.state.record(v, sampler(v), bounds);
    if (keep_picks) out.picks.push_back(v);
  }
  out.entropy = estimate_entropy(p, out.state);
  return out;
}

template <typename Sampler>
SingleFeatureResult run_single_feature(std::span<const double> p, Sampler&& sampler, std::size_t budget,
                                       Strategy strategy, double delta, bool keep_picks = false) {
  IntervalCache bounds(strategy.family, delta);
  return run_single_feature(p, std::forward<Sampler>(sampler), budget, strategy, bounds, keep_picks);
}

}  // namespace actfs

#endif  // ACTFS_SINGLE_FEATURE_HPP_
