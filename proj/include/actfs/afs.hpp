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

#ifndef ACTFS_AFS_HPP_
#define ACTFS_AFS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "actfs/confbounds.hpp"
#include "actfs/dataset.hpp"
#include "actfs/random.hpp"
#include "actfs/single_feature.hpp"

namespace actfs {

/// Vector reduction used to combine pair ratios and per-feature scores.
enum class Aggregation { L1, L2, Linf };

inline double aggregate(Aggregation psi, std::span<const double> xs) {
  double acc = 0.0;
  switch (psi) {
    case Aggregation::L1:
      for (double x : xs) acc += std::abs(x);
      return acc;
    case Aggregation::L2:
      for (double x : xs) acc += x * x;
      return std::sqrt(acc);
    case Aggregation::Linf:
      for (double x : xs) acc = std::max(acc, std::abs(x));
      return acc;
  }
  return acc;
}

inline std::optional<Aggregation> parse_aggregation(const std::string& s) {
  if (s == "l1") return Aggregation::L1;
  if (s == "l2") return Aggregation::L2;
  if (s == "linf") return Aggregation::Linf;
  return std::nullopt;
}

/// How the next example is scored. `Full` is the complete algorithm; the
/// others are the ablations.
enum class ScoreRule {
  Full,    // pair-ratio corrected score aggregated over the candidate set
  Single,  // plain score of one uniformly drawn feature
  AvgAll,  // mean plain score over all features
  AvgSel,  // mean plain score over the candidate set
};

/// Which bound each side of the current top-k receives when building the
/// alternative top-k.
enum class CandidateRule {
  // members of F_k take their upper bound, outsiders their lower bound
  Pessimistic,
  // members take the lower bound, outsiders the upper bound. With a valid
  // sandwich this reproduces F_k exactly, so the candidate set is always empty.
  Optimistic,
};

struct AfsConfig {
  std::size_t k = 1;
  double delta = 0.05;
  std::size_t budget = 0;
  std::optional<std::size_t> lambda = 30;  // nullopt: safeguard disabled
  Aggregation psi = Aggregation::L1;
  std::uint64_t seed = 0;
  ScoreRule rule = ScoreRule::Full;
  CandidateRule candidates = CandidateRule::Pessimistic;
  bool record_entropies = false;
};

struct EntropyTriple {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Plug-in estimate with its lower and upper confidence envelope, per feature.
inline std::vector<EntropyTriple> entropy_triples(std::span<const AllocationState> states, const MarginalTable& p) {
  std::vector<EntropyTriple> out(states.size());
  for (std::size_t j = 0; j < states.size(); ++j) {
    EntropyTriple t;
    std::vector<double> terms;
    for (std::size_t v = 0; v < p[j].size(); ++v) {
      if (p[j][v] <= 0.0) continue;
      const auto& iv = states[j].interval(v);
      terms.push_back(p[j][v] * binary_entropy(states[j].estimate(v)));
      t.lower += p[j][v] * lcb_hb(iv);
      t.upper += p[j][v] * ucb_shaped(Shape::Hb, iv);
    }
    t.estimate = ordered_sum(std::move(terms));
    out[j] = t;
  }
  return out;
}

/// The k indices with the smallest values (ties to the lower index), returned
/// in increasing index order.
inline std::vector<std::size_t> smallest_k(std::span<const double> values, std::size_t k) {
  std::vector<std::size_t> idx(values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) { return values[a] < values[b] || (values[a] == values[b] && a < b); });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct CandidateSets {
  std::vector<std::size_t> top;          // F_k
  std::vector<std::size_t> alternative;  // F~_k
  std::vector<std::size_t> candidates;   // F_k symmetric-difference F~_k
};

inline CandidateSets candidate_set(std::span<const EntropyTriple> triples, std::size_t k,
                                   CandidateRule rule = CandidateRule::Pessimistic) {
  if (k == 0 || k > triples.size()) throw std::invalid_argument("candidate_set: need 1 <= k <= d");
  std::vector<double> est(triples.size());
  for (std::size_t j = 0; j < triples.size(); ++j) est[j] = triples[j].estimate;
  CandidateSets out;
  out.top = smallest_k(est, k);
  std::vector<double> shifted(triples.size());
  for (std::size_t j = 0; j < triples.size(); ++j) {
    const bool inside = std::binary_search(out.top.begin(), out.top.end(), j);
    if (rule == CandidateRule::Pessimistic)
      shifted[j] = inside ? triples[j].upper : triples[j].lower;
    else
      shifted[j] = inside ? triples[j].lower : triples[j].upper;
  }
  out.alternative = smallest_k(shifted, k);
  std::set_symmetric_difference(out.top.begin(), out.top.end(), out.alternative.begin(), out.alternative.end(),
                                std::back_inserter(out.candidates));
  return out;
}

/// Mutable state of one run: per-feature allocation states over the labeled
/// set plus pair statistics for the bias ratio.
class AfsState {
 public:
  AfsState(const QuantizedDataset& ds, double delta)
      : ds_(&ds), p_(actfs::marginals(ds)), bounds_(BoundFamily::ClopperPearson, delta), full_pairs_(ds),
        labeled_mask_(ds.rows(), false) {
    states_.reserve(ds.features());
    for (std::size_t j = 0; j < ds.features(); ++j) states_.emplace_back(ds.alphabet(j));
  }

  const QuantizedDataset& dataset() const noexcept { return *ds_; }
  const MarginalTable& marginals() const noexcept { return p_; }
  std::span<const AllocationState> states() const noexcept { return states_; }
  const AllocationState& state(std::size_t j) const { return states_.at(j); }
  const std::vector<std::pair<std::size_t, int>>& labeled() const noexcept { return labeled_; }
  bool is_labeled(std::size_t i) const { return labeled_mask_.at(i); }

  void record(std::size_t index, int label) {
    if (labeled_mask_.at(index)) throw std::logic_error("AfsState: example labeled twice");
    labeled_mask_[index] = true;
    labeled_.emplace_back(index, label);
    for (std::size_t j = 0; j < ds_->features(); ++j) states_[j].record(ds_->at(index, j), label, bounds_);
  }

  std::vector<EntropyTriple> triples() const { return entropy_triples(states_, p_); }

  std::vector<double> estimates() const {
    std::vector<double> h(states_.size());
    for (std::size_t j = 0; j < states_.size(); ++j) h[j] = estimate_entropy(p_[j], states_[j]);
    return h;
  }

  /// Entropy-objective weight vector of feature j.
  std::vector<double> entropy_weights(std::size_t j) const { return weights(Objective::Entropy, p_[j], states_[j]); }

  /// Count of labeled examples with X(j1) = v1 and X(j2) = v2.
  std::size_t labeled_pair_count(std::size_t j1, std::size_t j2, Value v1, Value v2) {
    if (j1 == j2) throw std::invalid_argument("labeled_pair_count: features must differ");
    const bool swap = j1 > j2;
    const auto& t = labeled_pairs(swap ? j2 : j1, swap ? j1 : j2);
    return swap ? t.counts[v2 * t.cols + v1] : t.counts[v1 * t.cols + v2];
  }

  /// p^(j1,j2,v1,v2) / max(p^_t(j1,j2,v1,v2), 1/m), where p^_t is the share of
  /// labeled examples carrying the pair (0 before any label).
  double bias_ratio(std::size_t j1, std::size_t j2, Value v1, Value v2) {
    if (j1 == j2) throw std::invalid_argument("bias_ratio: features must differ");
    const double m = static_cast<double>(ds_->rows());
    const double full = full_pairs_.get(j1, j2).probability(v1, v2);
    const double within = labeled_.empty() ? 0.0
                                           : static_cast<double>(labeled_pair_count(j1, j2, v1, v2)) /
                                                 static_cast<double>(labeled_.size());
    return full / std::max(within, 1.0 / m);
  }

  /// Full bias-ratio matrix of an ordered feature pair, row-major in (v1, v2).
  std::vector<double> bias_ratios(std::size_t j1, std::size_t j2) {
    const std::size_t a = ds_->alphabet(j1);
    const std::size_t b = ds_->alphabet(j2);
    std::vector<double> out(a * b);
    for (Value v1 = 0; v1 < a; ++v1)
      for (Value v2 = 0; v2 < b; ++v2) out[v1 * b + v2] = bias_ratio(j1, j2, v1, v2);
    return out;
  }

 private:
  // Counts over the labeled set for j1 < j2, folded in incrementally.
  struct LabeledPairs {
    std::size_t cols = 0;
    std::vector<std::size_t> counts;
    std::size_t synced = 0;
  };

  const LabeledPairs& labeled_pairs(std::size_t j1, std::size_t j2) {
    auto [it, fresh] = labeled_pairs_.try_emplace({j1, j2});
    auto& t = it->second;
    if (fresh) {
      t.cols = ds_->alphabet(j2);
      t.counts.assign(ds_->alphabet(j1) * t.cols, 0);
    }
    for (; t.synced < labeled_.size(); ++t.synced) {
      const std::size_t i = labeled_[t.synced].first;
      ++t.counts[ds_->at(i, j1) * t.cols + ds_->at(i, j2)];
    }
    return t;
  }

  const QuantizedDataset* ds_;
  MarginalTable p_;
  IntervalCache bounds_;
  std::vector<AllocationState> states_;
  PairTableCache full_pairs_;
  std::map<std::pair<std::size_t, std::size_t>, LabeledPairs> labeled_pairs_;
  std::vector<std::pair<std::size_t, int>> labeled_;
  std::vector<bool> labeled_mask_;
};

/// Score of example x for candidate set F: psi over j in F of
///   w_I(j, x(j)) / (n(j, x(j)) + 1) * psi(rho(j, r, x(j), x(r)) for r in F \ {j}),
/// with the inner factor 1 when |F| = 1. `rho_scale` multiplies every ratio.
inline double example_score(AfsState& state, std::size_t x, std::span<const std::size_t> F, Aggregation psi,
                            double rho_scale = 1.0) {
  if (F.empty()) throw std::invalid_argument("example_score: empty feature set");
  const auto& ds = state.dataset();
  std::vector<double> per_feature;
  std::vector<double> ratios;
  for (std::size_t j : F) {
    const Value v = ds.at(x, j);
    const double w = state.entropy_weights(j)[v];
    const double base = w / (state.state(j).count(v) + 1.0);
    double correction = 1.0;
    if (F.size() > 1) {
      ratios.clear();
      for (std::size_t r : F)
        if (r != j) ratios.push_back(rho_scale * state.bias_ratio(j, r, v, ds.at(x, r)));
      correction = aggregate(psi, ratios);
    }
    per_feature.push_back(base * correction);
  }
  return aggregate(psi, per_feature);
}

struct TraceStep {
  std::optional<std::size_t> chosen;       // empty on the early-break step
  std::vector<std::size_t> top;            // F_k at the start of the step
  std::vector<std::size_t> candidates;     // F at the start of the step
  std::vector<double> entropies;           // H^ snapshot, if requested
  bool safeguard = false;                  // labeled by the random fallback
  bool early_break = false;                // candidate set was empty
};

struct RunTrace {
  std::vector<TraceStep> steps;
  std::size_t labels_used = 0;
  std::size_t unspent = 0;
  std::optional<std::size_t> safeguard_step;  // 1-based step after which the fallback took over
};

struct AfsResult {
  std::vector<std::size_t> selected;  // k features, increasing index
  std::vector<double> entropies;      // final H^ per feature
  std::vector<std::pair<std::size_t, int>> labeled;
  RunTrace trace;
};

namespace detail {

// Per-step precomputation shared by all examples in the scan.
struct ScanTables {
  std::vector<std::vector<double>> base;  // base[j][v] = w_I(j,v) / (n(j,v) + 1), for scored features
  std::vector<std::vector<std::vector<double>>> rho;  // rho[a][b] for positions a != b in F
};

inline void fill_base(AfsState& state, std::size_t j, ScanTables& tab) {
  const auto w = state.entropy_weights(j);
  auto& row = tab.base[j];
  row.resize(w.size());
  for (std::size_t v = 0; v < w.size(); ++v) row[v] = w[v] / (state.state(j).count(v) + 1.0);
}

template <typename ScoreFn>
std::optional<std::size_t> argmax_unlabeled(const AfsState& state, ScoreFn score) {
  std::optional<std::size_t> best;
  double best_score = 0.0;
  const std::size_t m = state.dataset().rows();
  for (std::size_t x = 0; x < m; ++x) {
    if (state.is_labeled(x)) continue;
    const double s = score(x);
    if (!best || s > best_score) {
      best = x;
      best_score = s;
    }
  }
  return best;
}

}  // namespace detail

/// Picks the next example under `cfg.rule`. Returns nothing when every
/// example is labeled.
inline std::optional<std::size_t> choose_example(AfsState& state, std::span<const std::size_t> F,
                                                 const AfsConfig& cfg, Rng& rng) {
  const auto& ds = state.dataset();
  const std::size_t d = ds.features();
  detail::ScanTables tab;
  tab.base.resize(d);

  switch (cfg.rule) {
    case ScoreRule::Full: {
      const std::size_t f = F.size();
      for (std::size_t j : F) detail::fill_base(state, j, tab);
      tab.rho.assign(f, std::vector<std::vector<double>>(f));
      for (std::size_t a = 0; a < f; ++a)
        for (std::size_t b = 0; b < f; ++b)
          if (a != b) tab.rho[a][b] = state.bias_ratios(F[a], F[b]);
      std::vector<double> per(f);
      std::vector<double> ratios;
      ratios.reserve(f);
      return detail::argmax_unlabeled(state, [&](std::size_t x) {
        for (std::size_t a = 0; a < f; ++a) {
          const Value va = ds.at(x, F[a]);
          double correction = 1.0;
          if (f > 1) {
            ratios.clear();
            for (std::size_t b = 0; b < f; ++b)
              if (b != a) ratios.push_back(tab.rho[a][b][va * ds.alphabet(F[b]) + ds.at(x, F[b])]);
            correction = aggregate(cfg.psi, ratios);
          }
          per[a] = tab.base[F[a]][va] * correction;
        }
        return aggregate(cfg.psi, per);
      });
    }
    case ScoreRule::Single: {
      const std::size_t j = uniform_index(rng, d);
      detail::fill_base(state, j, tab);
      return detail::argmax_unlabeled(state, [&](std::size_t x) { return tab.base[j][ds.at(x, j)]; });
    }
    case ScoreRule::AvgAll: {
      for (std::size_t j = 0; j < d; ++j) detail::fill_base(state, j, tab);
      return detail::argmax_unlabeled(state, [&](std::size_t x) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += tab.base[j][ds.at(x, j)];
        return s / static_cast<double>(d);
      });
    }
    case ScoreRule::AvgSel: {
      for (std::size_t j : F) detail::fill_base(state, j, tab);
      return detail::argmax_unlabeled(state, [&](std::size_t x) {
        double s = 0.0;
        for (std::size_t j : F) s += tab.base[j][ds.at(x, j)];
        return s / static_cast<double>(F.size());
      });
    }
  }
  return std::nullopt;
}

/// Active feature selection. `oracle.query(i)` must return the 0/1 label of
/// example i.
template <typename Oracle>
AfsResult afs_run(const QuantizedDataset& ds, Oracle& oracle, const AfsConfig& cfg) {
  const std::size_t d = ds.features();
  const std::size_t m = ds.rows();
  if (cfg.k == 0 || cfg.k > d) throw std::invalid_argument("afs_run: need 1 <= k <= d");
  if (cfg.budget > m) throw std::invalid_argument("afs_run: budget exceeds the number of examples");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw std::invalid_argument("afs_run: delta must lie in (0, 1)");
  if (cfg.lambda && *cfg.lambda == 0) throw std::invalid_argument("afs_run: lambda must be at least 1");

  AfsState state(ds, cfg.delta);
  Rng rng(derive_seed(cfg.seed, {0x5afe}));
  AfsResult result;
  auto& trace = result.trace;
  std::deque<double> window;  // top-k entropy sums at the start of recent steps

  std::size_t t = 0;
  for (; t < cfg.budget; ++t) {
    const auto triples = state.triples();
    const auto sets = candidate_set(triples, cfg.k, cfg.candidates);
    TraceStep step;
    step.top = sets.top;
    step.candidates = sets.candidates;
    if (cfg.record_entropies)
      for (const auto& tr : triples) step.entropies.push_back(tr.estimate);
    if (sets.candidates.empty()) {
      step.early_break = true;
      trace.steps.push_back(std::move(step));
      break;
    }
    const auto x = choose_example(state, sets.candidates, cfg, rng);
    if (!x) break;
    state.record(*x, oracle.query(*x));
    step.chosen = *x;
    trace.steps.push_back(std::move(step));

    if (cfg.lambda) {
      double sum = 0.0;
      for (std::size_t j : sets.top) sum += triples[j].estimate;
      window.push_back(sum);
      if (window.size() > *cfg.lambda + 1) window.pop_front();
      const bool stalled = window.size() == *cfg.lambda + 1 &&
                           std::all_of(window.begin(), window.end(), [&](double s) { return s == window.front(); });
      if (stalled) {
        ++t;
        trace.safeguard_step = t;
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < m; ++i)
          if (!state.is_labeled(i)) pool.push_back(i);
        for (std::size_t i : sample_without_replacement(pool, cfg.budget - t, rng)) {
          TraceStep fs;
          fs.top = smallest_k(state.estimates(), cfg.k);
          if (cfg.record_entropies) fs.entropies = state.estimates();
          state.record(i, oracle.query(i));
          fs.chosen = i;
          fs.safeguard = true;
          trace.steps.push_back(std::move(fs));
        }
        break;
      }
    }
  }

  result.labeled = state.labeled();
  trace.labels_used = result.labeled.size();
  trace.unspent = cfg.budget - trace.labels_used;
  result.entropies = state.estimates();
  result.selected = smallest_k(result.entropies, cfg.k);
  return result;
}

}  // namespace actfs

#endif  // ACTFS_AFS_HPP_
