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

#ifndef ACTFS_BASELINES_HPP_
#define ACTFS_BASELINES_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "actfs/afs.hpp"
#include "actfs/dataset.hpp"
#include "actfs/random.hpp"
#include "actfs/single_feature.hpp"

namespace actfs {

enum class BaselineKind { Random, Coreset };

/// Number of features on which two examples differ.
inline std::size_t hamming(const QuantizedDataset& ds, std::size_t a, std::size_t b) {
  std::size_t dist = 0;
  for (std::size_t j = 0; j < ds.features(); ++j) dist += ds.at(a, j) != ds.at(b, j);
  return dist;
}

/// Farthest-first traversal under Hamming distance from a given first
/// example. Ties go to the lowest index.
inline std::vector<std::size_t> farthest_first(const QuantizedDataset& ds, std::size_t count, std::size_t first) {
  const std::size_t m = ds.rows();
  if (count > m) throw std::invalid_argument("farthest_first: count exceeds the number of examples");
  std::vector<std::size_t> picked;
  if (count == 0) return picked;
  picked.reserve(count);
  std::vector<std::size_t> nearest(m, std::numeric_limits<std::size_t>::max());
  std::vector<bool> taken(m, false);
  std::size_t next = first;
  while (picked.size() < count) {
    picked.push_back(next);
    taken[next] = true;
    std::size_t best = m;
    std::size_t best_dist = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (taken[i]) continue;
      nearest[i] = std::min(nearest[i], hamming(ds, i, next));
      if (best == m || nearest[i] > best_dist) {
        best = i;
        best_dist = nearest[i];
      }
    }
    next = best;
  }
  return picked;
}

/// B distinct example indices in selection order.
inline std::vector<std::size_t> select_examples(BaselineKind kind, const QuantizedDataset& ds, std::size_t budget,
                                                std::uint64_t seed) {
  const std::size_t m = ds.rows();
  if (budget > m) throw std::invalid_argument("select_examples: budget exceeds the number of examples");
  Rng rng(seed);
  if (kind == BaselineKind::Random) {
    std::vector<std::size_t> pool(m);
    for (std::size_t i = 0; i < m; ++i) pool[i] = i;
    return sample_without_replacement(pool, budget, rng);
  }
  if (budget == 0) return {};
  return farthest_first(ds, budget, uniform_index(rng, m));
}

/// Plug-in conditional entropies from a labeled subset, with value marginals
/// taken from the full sample.
inline std::vector<double> entropies_from_labels(const QuantizedDataset& ds,
                                                 std::span<const std::pair<std::size_t, int>> labeled) {
  const auto p = marginals(ds);
  std::vector<double> h(ds.features(), 0.0);
  std::vector<std::uint32_t> n;
  std::vector<std::uint32_t> s;
  std::vector<double> terms;
  for (std::size_t j = 0; j < ds.features(); ++j) {
    n.assign(ds.alphabet(j), 0);
    s.assign(ds.alphabet(j), 0);
    for (const auto& [i, y] : labeled) {
      ++n[ds.at(i, j)];
      s[ds.at(i, j)] += (y != 0);
    }
    terms.clear();
    for (std::size_t v = 0; v < n.size(); ++v)
      if (n[v]) terms.push_back(p[j][v] * binary_entropy(static_cast<double>(s[v]) / n[v]));
    h[j] = ordered_sum(terms);
  }
  return h;
}

/// The k features with the smallest plug-in conditional entropy on the
/// labeled subset.
inline std::vector<std::size_t> rank_from_labels(const QuantizedDataset& ds,
                                                 std::span<const std::pair<std::size_t, int>> labeled,
                                                 std::size_t k) {
  if (labeled.empty()) throw std::invalid_argument("rank_from_labels: no labels");
  if (k == 0 || k > ds.features()) throw std::invalid_argument("rank_from_labels: need 1 <= k <= d");
  return smallest_k(entropies_from_labels(ds, labeled), k);
}

/// Labels the examples chosen by a baseline and ranks the features.
template <typename Oracle>
std::vector<std::size_t> run_baseline(BaselineKind kind, const QuantizedDataset& ds, Oracle& oracle, std::size_t k,
                                      std::size_t budget, std::uint64_t seed) {
  std::vector<std::pair<std::size_t, int>> labeled;
  for (std::size_t i : select_examples(kind, ds, budget, seed)) labeled.emplace_back(i, oracle.query(i));
  return rank_from_labels(ds, labeled, k);
}

}  // namespace actfs

#endif  // ACTFS_BASELINES_HPP_
