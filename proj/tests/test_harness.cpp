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

#include <atomic>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "actfs/harness.hpp"
#include "test_util.hpp"

namespace actfs {
namespace {

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (std::size_t threads : {1, 2, 5}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) ASSERT_EQ(h, 1);
  }
  parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(ParallelFor, RethrowsWorkerErrors) {
  for (std::size_t threads : {1, 3})
    EXPECT_THROW(parallel_for(50, threads,
                              [](std::size_t i) {
                                if (i == 17) throw std::runtime_error("boom");
                              }),
                 std::runtime_error);
}

TEST(DefaultThreads, HonoursEnvironmentCap) {
  const char* old = std::getenv("ACTFS_THREADS");
  const std::string saved = old ? old : "";
  setenv("ACTFS_THREADS", "1", 1);
  EXPECT_EQ(default_threads(), 1u);
  setenv("ACTFS_THREADS", "junk", 1);
  EXPECT_GE(default_threads(), 1u);
  if (old)
    setenv("ACTFS_THREADS", saved.c_str(), 1);
  else
    unsetenv("ACTFS_THREADS");
}

TEST(Scenarios, FixedFamily) {
  const auto all = fixed_q_scenarios({2, 4, 6, 8, 10}, {0.1, 0.01, 0.001});
  EXPECT_EQ(all.size(), 95u);
  std::set<std::string> names;
  for (const auto& s : all) {
    names.insert(s.name);
    double total = 0.0;
    for (double p : s.p) total += p;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
  EXPECT_EQ(names.size(), 95u);
  EXPECT_EQ(all[0].name, "[0.1 0.1]");
  EXPECT_EQ(all[1].name, "[0.1 0.5]");
  EXPECT_EQ(all[2].name, "[0.01 0.01]");
  EXPECT_EQ(all[6].name, "[0.5 0.5]");
  EXPECT_EQ(all[7].name, "[0.1 0.1 0.1 0.1]");
}

TEST(Scenarios, UniformFamily) {
  const auto a = uniform_q_scenarios({2, 4, 6, 8, 10}, 5, 3);
  const auto b = uniform_q_scenarios({2, 4, 6, 8, 10}, 5, 3);
  ASSERT_EQ(a.size(), 25u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].q, b[i].q);
    for (double q : a[i].q) {
      EXPECT_GE(q, 0.0);
      EXPECT_LE(q, 0.5);
      EXPECT_NEAR(q * 100, std::round(q * 100), 1e-9);
    }
  }
  EXPECT_NE(a[0].q, uniform_q_scenarios({2}, 1, 4)[0].q);
}

TEST(Scenarios, Validation) {
  EXPECT_THROW(make_scenario({0.1, 0.2}, {0.5}), std::invalid_argument);
  EXPECT_THROW(make_scenario({0.1, 0.2}, {0.5, 0.6}), std::invalid_argument);
  EXPECT_EQ(make_scenario({0.25}).p, (std::vector<double>{1.0}));
  EXPECT_EQ(describe_q({0.5, 0.001}), "[0.5 0.001]");
}

TEST(SingleBench, ZeroParametersTieEverywhere) {
  SingleBenchConfig cfg;
  cfg.scenarios = {make_scenario({0.0, 0.0})};
  cfg.budgets = {20};
  cfg.replicates = 5;
  const auto rows = run_single_feature_bench(cfg, 1, 1);
  ASSERT_EQ(rows.size(), 9u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.ci.mean, 0.0);
    EXPECT_EQ(r.ci.half_width, 0.0);
    EXPECT_TRUE(r.win);
    EXPECT_TRUE(r.clear_win);
  }
}

TEST(SingleBench, RowOrderInvariantsAndThreadIndependence) {
  SingleBenchConfig cfg;
  cfg.scenarios = {make_scenario({0.01, 0.5}), make_scenario({0.1, 0.2, 0.3})};
  cfg.budgets = {30, 60};
  cfg.replicates = 40;
  const auto a = run_single_feature_bench(cfg, 9, 1);
  const auto b = run_single_feature_bench(cfg, 9, 3);
  ASSERT_EQ(a.size(), 2u * 2u * 9u);
  std::ostringstream sa, sb;
  write_single_feature_csv(sa, a);
  write_single_feature_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(sa.str().substr(0, sa.str().find('\n')), "scenario,strategy,budget,mean_err,ci_lo,ci_hi,win,clear_win");
  EXPECT_EQ(a[0].scenario, "[0.01 0.5]");
  EXPECT_EQ(a[0].method, "PROP");
  EXPECT_EQ(a[9].budget, 60u);
  EXPECT_EQ(a[18].scenario, "[0.1 0.2 0.3]");
  for (std::size_t g = 0; g < 4; ++g) {
    bool any = false;
    for (std::size_t i = 0; i < 9; ++i) {
      const auto& r = a[g * 9 + i];
      EXPECT_GE(r.ci.half_width, 0.0);
      if (r.clear_win) EXPECT_TRUE(r.win);
      any = any || r.win;
    }
    EXPECT_TRUE(any);
  }
  const auto tally = tally_wins(a);
  ASSERT_EQ(tally.size(), 9u);
  std::size_t wins = 0;
  for (const auto& t : tally) wins += t.wins;
  std::size_t direct = 0;
  for (const auto& r : a) direct += r.win;
  EXPECT_EQ(wins, direct);
  cfg.replicates = 1;
  EXPECT_THROW(run_single_feature_bench(cfg, 9, 1), std::invalid_argument);
}

TEST(MiGap, NonNegativeAndZeroAtOptimum) {
  const std::vector<double> h{0.3, 0.1, 0.2, 0.1};
  EXPECT_EQ(mi_gap(h, std::vector<std::size_t>{1, 3}), 0.0);
  EXPECT_NEAR(mi_gap(h, std::vector<std::size_t>{0, 1}), 0.2, 1e-15);
  EXPECT_NEAR(mi_gap(h, std::vector<std::size_t>{0}), 0.2, 1e-15);
}

TEST(HarnessProperty, GapIsNeverNegative) {
  Rng rng(71);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> h(1 + uniform_index(rng, 10));
    for (auto& x : h) x = uniform_index(rng, 4) * 0.1;
    std::vector<std::size_t> idx(h.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    auto sel = sample_without_replacement(idx, 1 + uniform_index(rng, h.size()), rng);
    ASSERT_GE(mi_gap(h, sel), 0.0);
  }
}

TEST(SelectionBench, FullBudgetGivesZeroGap) {
  SelectionScenario sc;
  sc.source.name = "tiny, quoted";
  sc.source.data = PlantedSpec{60, 4, 1, {0.2, 0.8}};
  sc.ks = {1, 2};
  sc.budgets = {60};
  sc.replicates = 3;
  sc.methods = {Method::Afs, Method::Random, Method::Coreset, Method::Single, Method::AvgAll, Method::AvgSel,
                Method::AfsNoSafeguard};
  const auto rows = run_selection_bench(sc, 5, 1);
  ASSERT_EQ(rows.size(), 2u * 7u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.gaps.size(), 3u);
    if (r.method == "AFS" || r.method == "RANDOM" || r.method == "CORESET" || r.method == "AFS-NOSG")
      EXPECT_EQ(r.ci.mean, 0.0) << r.method << " k=" << r.k;
    for (double g : r.gaps) EXPECT_GE(g, 0.0);
  }
  std::ostringstream out;
  write_selection_csv(out, rows);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "dataset,method,k,budget,mean_gap,ci_lo,ci_hi");
  EXPECT_NE(out.str().find("\n\"tiny, quoted\",AFS,1,60,0,0,0\n"), std::string::npos);
}

TEST(SelectionBench, ThreadIndependent) {
  SelectionScenario sc;
  sc.source.name = "planted";
  sc.source.data = PlantedSpec{300, 5, 0, {0.1, 0.9}};
  sc.budgets = {40, 80};
  sc.replicates = 4;
  const auto a = run_selection_bench(sc, 5, 1);
  const auto b = run_selection_bench(sc, 5, 4);
  std::ostringstream sa, sb;
  write_selection_csv(sa, a);
  write_selection_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  sc.replicates = 1;
  EXPECT_THROW(run_selection_bench(sc, 5, 1), std::invalid_argument);
}

TEST(SelectionBench, NeedsGroundTruth) {
  SelectionScenario sc;
  sc.source.data = std::make_shared<const QuantizedDataset>(QuantizedDataset({{0, 1, 0}}, {2}));
  sc.replicates = 2;
  sc.budgets = {2};
  EXPECT_THROW(run_selection_bench(sc, 1, 1), DataError);
}

TEST(CsvField, QuotesOnlyWhenNeeded) {
  EXPECT_EQ(csv_field("[0.1 0.5]"), "[0.1 0.5]");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

}  // namespace
}  // namespace actfs
