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

#ifndef ACTFS_HARNESS_HPP_
#define ACTFS_HARNESS_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "actfs/afs.hpp"
#include "actfs/baselines.hpp"
#include "actfs/confbounds.hpp"
#include "actfs/dataset.hpp"
#include "actfs/random.hpp"
#include "actfs/single_feature.hpp"
#include "actfs/stats.hpp"

namespace actfs {

// ---------------------------------------------------------------------------
// Parallel replicate execution.

/// Worker count: hardware concurrency, capped by ACTFS_THREADS when set.
inline std::size_t default_threads() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ACTFS_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return n;
}

/// Runs fn(i) for i in [0, n). Each index must write only its own output
/// slot; the first exception is rethrown after all workers stop.
inline void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  pool.clear();
  if (error) std::rethrow_exception(error);
}

inline std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

/// RFC 4180 quoting, applied only when the field needs it.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

// ---------------------------------------------------------------------------
// Single-feature benchmark.

struct SingleFeatureScenario {
  std::string name;
  std::vector<double> q;
  std::vector<double> p;
};

inline std::string describe_q(const std::vector<double>& q) {
  std::string s = "[";
  for (std::size_t i = 0; i < q.size(); ++i) s += (i ? " " : "") + format_number(q[i]);
  return s + "]";
}

inline SingleFeatureScenario make_scenario(std::vector<double> q, std::vector<double> p = {}) {
  if (p.empty()) p.assign(q.size(), 1.0 / static_cast<double>(q.size()));
  if (p.size() != q.size()) throw std::invalid_argument("scenario: q and p differ in length");
  double total = 0.0;
  for (double x : p) total += x;
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("scenario: p must sum to 1");
  return {describe_q(q), std::move(q), std::move(p)};
}

/// For every size s and alpha: n values at 1/2 and the remaining s - n at
/// alpha, n = 0..s. The all-1/2 vector is listed once per size.
inline std::vector<SingleFeatureScenario> fixed_q_scenarios(const std::vector<std::size_t>& sizes,
                                                            const std::vector<double>& alphas) {
  std::vector<SingleFeatureScenario> out;
  for (std::size_t s : sizes) {
    for (std::size_t a = 0; a < alphas.size(); ++a)
      for (std::size_t n = 0; n < s; ++n) {
        std::vector<double> q(s, 0.5);
        for (std::size_t v = 0; v + n < s; ++v) q[v] = alphas[a];
        out.push_back(make_scenario(std::move(q)));
      }
    out.push_back(make_scenario(std::vector<double>(s, 0.5)));
  }
  return out;
}

/// `repeats` scenarios per size with q_v drawn from U[0, 1/2], rounded to two
/// decimals.
inline std::vector<SingleFeatureScenario> uniform_q_scenarios(const std::vector<std::size_t>& sizes,
                                                              std::size_t repeats, std::uint64_t seed) {
  std::vector<SingleFeatureScenario> out;
  Rng rng(derive_seed(seed, {0x9a11}));
  for (std::size_t s : sizes)
    for (std::size_t r = 0; r < repeats; ++r) {
      std::vector<double> q(s);
      for (double& x : q) x = std::round(50.0 * uniform01(rng)) / 100.0;
      out.push_back(make_scenario(std::move(q)));
    }
  return out;
}

struct SingleBenchConfig {
  std::vector<SingleFeatureScenario> scenarios;
  std::vector<std::size_t> budgets{50, 100, 300, 500};
  std::size_t replicates = 1000;
  std::vector<Strategy> strategies = standard_strategies();
  double delta = 0.05;
};

struct SummaryRow {
  std::string scenario;
  std::string method;
  std::size_t budget = 0;
  MeanCi ci;
  bool win = false;
  bool clear_win = false;
};

/// Per-replicate absolute errors |H^ - H| of one strategy on one scenario.
inline std::vector<double> single_feature_errors(const SingleFeatureScenario& sc, Strategy strategy,
                                                 std::size_t budget, std::size_t replicates, double delta,
                                                 std::uint64_t seed) {
  const double truth = conditional_entropy(sc.p, sc.q);
  IntervalCache bounds(strategy.family, delta);
  std::vector<double> err(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    BernoulliSampler draw(sc.q, derive_seed(seed, {r}));
    err[r] = std::abs(run_single_feature(sc.p, draw, budget, strategy, bounds).entropy - truth);
  }
  return err;
}

inline void mark_wins(std::vector<SummaryRow>& rows, std::size_t first, std::size_t count) {
  std::vector<MeanCi> cis;
  for (std::size_t i = 0; i < count; ++i) cis.push_back(rows[first + i].ci);
  const auto flags = win_flags(cis);
  for (std::size_t i = 0; i < count; ++i) {
    rows[first + i].win = flags[i].win;
    rows[first + i].clear_win = flags[i].clear_win;
  }
}

/// Rows are ordered scenario, budget, strategy; win flags compare the
/// strategies within each (scenario, budget).
inline std::vector<SummaryRow> run_single_feature_bench(const SingleBenchConfig& cfg, std::uint64_t seed,
                                                        std::size_t threads = default_threads()) {
  if (cfg.replicates < 2) throw std::invalid_argument("single-feature bench: need at least two replicates");
  const std::size_t ns = cfg.scenarios.size();
  const std::size_t nb = cfg.budgets.size();
  const std::size_t nm = cfg.strategies.size();
  std::vector<SummaryRow> rows(ns * nb * nm);
  parallel_for(rows.size(), threads, [&](std::size_t idx) {
    const std::size_t s = idx / (nb * nm);
    const std::size_t b = (idx / nm) % nb;
    const std::size_t k = idx % nm;
    const auto err = single_feature_errors(cfg.scenarios[s], cfg.strategies[k], cfg.budgets[b], cfg.replicates,
                                           cfg.delta, derive_seed(seed, {s, cfg.budgets[b], k}));
    rows[idx] = {cfg.scenarios[s].name, cfg.strategies[k].name(), cfg.budgets[b], mean_ci(err), false, false};
  });
  for (std::size_t g = 0; g < ns * nb; ++g) mark_wins(rows, g * nm, nm);
  return rows;
}

/// Number of wins and clear wins per method over all row groups.
struct WinTally {
  std::string method;
  std::size_t clear_wins = 0;
  std::size_t wins = 0;
};

inline std::vector<WinTally> tally_wins(const std::vector<SummaryRow>& rows) {
  std::vector<WinTally> out;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const WinTally& t) { return t.method == r.method; });
    if (it == out.end()) it = out.insert(out.end(), WinTally{r.method});
    it->wins += r.win;
    it->clear_wins += r.clear_win;
  }
  return out;
}

inline void write_single_feature_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "scenario,strategy,budget,mean_err,ci_lo,ci_hi,win,clear_win\n";
  for (const auto& r : rows)
    out << csv_field(r.scenario) << ',' << r.method << ',' << r.budget << ',' << format_number(r.ci.mean) << ','
        << format_number(r.ci.lower()) << ',' << format_number(r.ci.upper()) << ',' << r.win << ',' << r.clear_win
        << '\n';
}

// ---------------------------------------------------------------------------
// Multi-feature selection benchmark.

enum class Method { Afs, AfsNoSafeguard, Single, AvgAll, AvgSel, Random, Coreset };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::Afs: return "AFS";
    case Method::AfsNoSafeguard: return "AFS-NOSG";
    case Method::Single: return "SINGLE";
    case Method::AvgAll: return "AVG-ALL";
    case Method::AvgSel: return "AVG-SEL";
    case Method::Random: return "RANDOM";
    case Method::Coreset: return "CORESET";
  }
  return "?";
}

/// The algorithm and its four ablations as run configurations.
inline std::vector<std::pair<Method, AfsConfig>> ablation_variants(const AfsConfig& base) {
  std::vector<std::pair<Method, AfsConfig>> out;
  AfsConfig single = base;
  single.rule = ScoreRule::Single;
  AfsConfig avg_all = base;
  avg_all.rule = ScoreRule::AvgAll;
  AfsConfig avg_sel = base;
  avg_sel.rule = ScoreRule::AvgSel;
  AfsConfig nosg = base;
  nosg.rule = ScoreRule::Full;
  nosg.lambda = std::nullopt;
  AfsConfig full = base;
  full.rule = ScoreRule::Full;
  out.emplace_back(Method::Single, single);
  out.emplace_back(Method::AvgAll, avg_all);
  out.emplace_back(Method::AvgSel, avg_sel);
  out.emplace_back(Method::AfsNoSafeguard, nosg);
  out.emplace_back(Method::Afs, full);
  return out;
}

/// Planted-feature generator parameters (see planted_dataset).
struct PlantedSpec {
  std::size_t m = 2000;
  std::size_t d = 10;
  std::size_t informative = 0;
  std::vector<double> q{0.05, 0.95};
};

/// A fixed labeled dataset, or a generator drawing a fresh one per replicate.
struct SelectionSource {
  std::string name;
  std::variant<std::shared_ptr<const QuantizedDataset>, PlantedSpec> data;

  QuantizedDataset instance(std::uint64_t seed) const {
    if (const auto* fixed = std::get_if<std::shared_ptr<const QuantizedDataset>>(&data)) return **fixed;
    const auto& spec = std::get<PlantedSpec>(data);
    return planted_dataset(spec.m, spec.d, spec.informative, spec.q, seed);
  }
};

struct SelectionScenario {
  SelectionSource source;
  std::vector<std::size_t> ks{1};
  std::vector<std::size_t> budgets{300};
  std::size_t replicates = 30;
  std::vector<Method> methods{Method::Afs, Method::Random, Method::Coreset};
  AfsConfig afs;  // delta, lambda, psi shared by all AFS variants
};

struct SelectionRow {
  std::string dataset;
  std::string method;
  std::size_t k = 0;
  std::size_t budget = 0;
  MeanCi ci;
  std::vector<double> gaps;  // per replicate
};

/// Exact conditional entropies from the full label column.
inline std::vector<double> true_entropies(const QuantizedDataset& ds) {
  const auto& y = ds.labels();
  std::vector<std::pair<std::size_t, int>> all(ds.rows());
  for (std::size_t i = 0; i < ds.rows(); ++i) all[i] = {i, y[i]};
  return entropies_from_labels(ds, all);
}

/// sum_{F} H - sum_{F*} H, with F* the exact top-k; never negative.
inline double mi_gap(std::span<const double> truth, std::span<const std::size_t> selected) {
  const auto best = smallest_k(truth, selected.size());
  std::vector<double> chosen;
  std::vector<double> optimal;
  for (std::size_t j : selected) chosen.push_back(truth[j]);
  for (std::size_t j : best) optimal.push_back(truth[j]);
  return std::max(ordered_sum(std::move(chosen)) - ordered_sum(std::move(optimal)), 0.0);
}

inline AfsConfig method_config(Method m, const AfsConfig& base) {
  for (const auto& [method, cfg] : ablation_variants(base))
    if (method == m) return cfg;
  throw std::invalid_argument("method_config: not an AFS variant");
}

/// Selected features of one method on one dataset instance.
inline std::vector<std::size_t> run_method(Method method, const QuantizedDataset& ds, std::size_t k,
                                           std::size_t budget, const AfsConfig& base, std::uint64_t seed) {
  DatasetOracle oracle(ds);
  if (method == Method::Random || method == Method::Coreset)
    return run_baseline(method == Method::Random ? BaselineKind::Random : BaselineKind::Coreset, ds, oracle, k,
                        budget, seed);
  AfsConfig cfg = method_config(method, base);
  cfg.k = k;
  cfg.budget = budget;
  cfg.seed = seed;
  return afs_run(ds, oracle, cfg).selected;
}

/// Rows ordered k, budget, method.
inline std::vector<SelectionRow> run_selection_bench(const SelectionScenario& sc, std::uint64_t seed,
                                                     std::size_t threads = default_threads()) {
  if (sc.replicates < 2) throw std::invalid_argument("selection bench: need at least two replicates");
  const std::size_t nk = sc.ks.size();
  const std::size_t nb = sc.budgets.size();
  const std::size_t nm = sc.methods.size();
  const std::size_t nr = sc.replicates;
  std::vector<double> gaps(nk * nb * nm * nr);
  // one task per replicate so a generated dataset is shared by every cell
  parallel_for(nr, threads, [&](std::size_t r) {
    const QuantizedDataset ds = sc.source.instance(derive_seed(seed, {0xda7a, r}));
    if (!ds.has_labels()) throw DataError("selection bench: dataset has no ground-truth labels");
    const auto truth = true_entropies(ds);
    for (std::size_t ki = 0; ki < nk; ++ki)
      for (std::size_t bi = 0; bi < nb; ++bi)
        for (std::size_t mi = 0; mi < nm; ++mi) {
          const auto sel = run_method(sc.methods[mi], ds, sc.ks[ki], sc.budgets[bi], sc.afs,
                                      derive_seed(seed, {r, sc.ks[ki], sc.budgets[bi], mi}));
          gaps[((ki * nb + bi) * nm + mi) * nr + r] = mi_gap(truth, sel);
        }
  });
  std::vector<SelectionRow> rows;
  for (std::size_t ki = 0; ki < nk; ++ki)
    for (std::size_t bi = 0; bi < nb; ++bi)
      for (std::size_t mi = 0; mi < nm; ++mi) {
        const std::size_t off = ((ki * nb + bi) * nm + mi) * nr;
        std::vector<double> g(gaps.begin() + static_cast<std::ptrdiff_t>(off),
                              gaps.begin() + static_cast<std::ptrdiff_t>(off + nr));
        rows.push_back({sc.source.name, to_string(sc.methods[mi]), sc.ks[ki], sc.budgets[bi], mean_ci(g), g});
      }
  return rows;
}

inline void write_selection_csv(std::ostream& out, const std::vector<SelectionRow>& rows) {
  out << "dataset,method,k,budget,mean_gap,ci_lo,ci_hi\n";
  for (const auto& r : rows)
    out << csv_field(r.dataset) << ',' << r.method << ',' << r.k << ',' << r.budget << ',' << format_number(r.ci.mean) << ','
        << format_number(r.ci.lower()) << ',' << format_number(r.ci.upper()) << '\n';
}

}  // namespace actfs

#endif  // ACTFS_HARNESS_HPP_
