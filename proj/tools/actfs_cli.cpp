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

// actfs: active feature selection from the command line.
//
//   actfs single-bench --config fixedq.toml --seed 7 --out results/
//   actfs select data.csv --label y --k 5 --budget 300 --trace trace.csv
//   actfs compare --csv data.csv --label y --k 5 --budgets 100,300 --out results/
//   actfs ablate --planted --k 1 --budgets 300
//
// Exit status: 0 success, 1 usage error, 2 data error.

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "actfs/actfs.hpp"

namespace {

using namespace actfs;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::optional<std::size_t> parse_lambda(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::nullopt;
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("--lambda expects a positive integer or 'inf'");
  }
  if (pos != s.size() || v < 1) throw UsageError("--lambda expects a positive integer or 'inf'");
  return static_cast<std::size_t>(v);
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

// ---------------------------------------------------------------------------

struct SingleBenchArgs {
  std::string config;
  std::uint64_t seed = 0;
  std::string out = ".";
  std::size_t threads = 0;
};

SingleBenchConfig single_bench_from(const Config& cfg, std::uint64_t seed) {
  cfg.restrict_to({"scenarios", "sizes", "alphas", "uniform_repeats", "q", "p", "budgets", "replicates", "delta",
                   "strategies"});
  SingleBenchConfig out;
  const std::string kind = cfg.string("scenarios", "fixed");
  const auto sizes = cfg.sizes("sizes", {2, 4, 6, 8, 10});
  if (kind == "fixed") {
    out.scenarios = fixed_q_scenarios(sizes, cfg.numbers("alphas", {0.1, 0.01, 0.001}));
  } else if (kind == "uniform") {
    out.scenarios = uniform_q_scenarios(sizes, cfg.count("uniform_repeats", 5), seed);
  } else if (kind == "custom") {
    const auto qs = cfg.all_numbers("q");
    const auto ps = cfg.all_numbers("p");
    if (qs.empty()) throw DataError("config: custom scenarios need at least one 'q' line");
    if (!ps.empty() && ps.size() != qs.size()) throw DataError("config: give one 'p' line per 'q' line or none");
    for (std::size_t i = 0; i < qs.size(); ++i) {
      try {
        out.scenarios.push_back(make_scenario(qs[i], ps.empty() ? std::vector<double>{} : ps[i]));
      } catch (const std::invalid_argument& e) {
        throw DataError(std::string("config: ") + e.what());
      }
    }
  } else {
    throw DataError("config: scenarios must be \"fixed\", \"uniform\" or \"custom\"");
  }
  out.budgets = cfg.sizes("budgets", out.budgets);
  out.replicates = cfg.count("replicates", out.replicates);
  out.delta = cfg.number("delta", out.delta);
  if (cfg.has("strategies")) {
    out.strategies.clear();
    for (const auto& name : cfg.strings("strategies")) {
      auto s = parse_strategy(name);
      if (!s) throw DataError("config: unknown strategy '" + name + "'");
      out.strategies.push_back(*s);
    }
  }
  if (out.replicates < 2) throw DataError("config: replicates must be at least 2");
  for (std::size_t b : out.budgets)
    if (b == 0) throw DataError("config: budgets must be positive");
  if (!(out.delta > 0.0 && out.delta < 1.0)) throw DataError("config: delta must lie in (0, 1)");
  return out;
}

int run_single_bench(const SingleBenchArgs& args) {
  const auto cfg = single_bench_from(Config::load(args.config), args.seed);
  const auto rows = run_single_feature_bench(cfg, args.seed, args.threads ? args.threads : default_threads());
  auto out = open_output(std::filesystem::path(args.out) / "single_feature_results.csv");
  write_single_feature_csv(out, rows);
  std::cout << "strategy,clear_wins,wins\n";
  for (const auto& t : tally_wins(rows)) std::cout << t.method << ',' << t.clear_wins << ',' << t.wins << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct SelectArgs {
  std::string csv;
  std::string label;
  std::size_t bins = 5;
  std::size_t k = 1;
  std::string budget;
  double delta = 0.05;
  std::string lambda = "30";
  std::string psi = "l1";
  std::uint64_t seed = 0;
  std::string oracle = "dataset";
  std::string trace;
};

int run_select(const SelectArgs& args) {
  const bool interactive = args.oracle == "interactive";
  if (interactive && !isatty(STDIN_FILENO)) throw UsageError("--oracle interactive needs a terminal on stdin");
  if (!interactive && args.label.empty()) throw UsageError("--oracle dataset needs --label");

  CsvOptions opt;
  opt.bins = args.bins;
  if (!args.label.empty()) opt.label_column = args.label;
  const QuantizedDataset ds = load_csv(args.csv, opt);

  AfsConfig cfg;
  cfg.k = args.k;
  cfg.delta = args.delta;
  cfg.lambda = parse_lambda(args.lambda);
  cfg.psi = *parse_aggregation(args.psi);
  cfg.seed = args.seed;
  if (args.budget == "m" || args.budget == "all") {
    cfg.budget = ds.rows();
  } else {
    std::size_t pos = 0;
    long long b = -1;
    try {
      b = std::stoll(args.budget, &pos);
    } catch (const std::exception&) {
    }
    if (b < 1 || pos != args.budget.size()) throw UsageError("--budget expects a positive integer, 'm' or 'all'");
    cfg.budget = static_cast<std::size_t>(b);
  }
  if (cfg.budget > ds.rows())
    throw UsageError("--budget " + std::to_string(cfg.budget) + " exceeds the " + std::to_string(ds.rows()) +
                     " examples in the dataset");
  if (cfg.k < 1 || cfg.k > ds.features())
    throw UsageError("--k must lie in [1, " + std::to_string(ds.features()) + "]");

  AfsResult result;
  std::vector<std::string> transcript;
  if (interactive) {
    InteractiveOracle oracle(std::cin, std::cerr);
    try {
      result = afs_run(ds, oracle, cfg);
    } catch (const OracleAborted&) {
      transcript = oracle.transcript();
      throw;
    }
    transcript = oracle.transcript();
  } else {
    DatasetOracle oracle(ds);
    result = afs_run(ds, oracle, cfg);
  }

  if (!args.trace.empty()) {
    std::optional<std::vector<double>> truth;
    if (ds.has_labels()) truth = true_entropies(ds);
    auto out = open_output(args.trace);
    out << "step,chosen_index,gap_if_known,safeguard_flag\n";
    std::size_t step = 0;
    for (const auto& s : result.trace.steps) {
      out << ++step << ',';
      if (s.chosen) out << *s.chosen;
      out << ',';
      if (truth) out << format_number(mi_gap(*truth, s.top));
      out << ',' << s.safeguard << '\n';
    }
    for (const auto& line : transcript) out << "# " << line << '\n';
  }

  for (std::size_t j : result.selected) std::cout << ds.name(j) << '\n';
  std::cerr << "labels used: " << result.trace.labels_used << " of " << cfg.budget;
  if (result.trace.safeguard_step) std::cerr << " (random fallback after step " << *result.trace.safeguard_step << ")";
  std::cerr << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct SelectionArgs {
  std::string config;
  std::string csv;
  std::string label;
  std::size_t bins = 5;
  bool planted = false;
  std::optional<std::size_t> m;
  std::optional<std::size_t> d;
  std::optional<std::size_t> informative;
  std::vector<std::size_t> ks;
  std::vector<std::size_t> budgets;
  std::size_t replicates = 0;
  double delta = 0.05;
  std::string lambda = "30";
  std::string psi = "l1";
  std::uint64_t seed = 0;
  std::string out = ".";
  std::size_t threads = 0;
};

SelectionScenario selection_scenario(const SelectionArgs& args, std::vector<Method> methods) {
  SelectionScenario sc;
  sc.methods = std::move(methods);
  sc.afs.delta = args.delta;
  sc.afs.lambda = parse_lambda(args.lambda);
  sc.afs.psi = *parse_aggregation(args.psi);

  std::string csv = args.csv;
  std::string label = args.label;
  std::size_t bins = args.bins;
  bool planted = args.planted;
  PlantedSpec spec;
  if (!args.config.empty()) {
    const auto cfg = Config::load(args.config);
    cfg.restrict_to({"dataset", "label", "bins", "name", "planted", "m", "d", "informative", "q", "ks", "budgets",
                     "replicates", "delta", "lambda", "psi"});
    csv = cfg.string("dataset", csv);
    label = cfg.string("label", label);
    bins = cfg.count("bins", bins);
    planted = planted || cfg.number("planted", 0) != 0;
    spec.m = cfg.count("m", spec.m);
    spec.d = cfg.count("d", spec.d);
    spec.informative = cfg.count("informative", 0);
    spec.q = cfg.numbers("q", spec.q);
    sc.ks = cfg.sizes("ks", sc.ks);
    sc.budgets = cfg.sizes("budgets", sc.budgets);
    sc.replicates = cfg.count("replicates", sc.replicates);
    sc.afs.delta = cfg.number("delta", sc.afs.delta);
    if (cfg.has("lambda")) sc.afs.lambda = parse_lambda(cfg.string("lambda", "30"));
    if (cfg.has("psi")) {
      auto psi = parse_aggregation(cfg.string("psi", "l1"));
      if (!psi) throw DataError("config: psi must be l1, l2 or linf");
      sc.afs.psi = *psi;
    }
    sc.source.name = cfg.string("name", "");
  }
  if (args.m) spec.m = *args.m;
  if (args.d) spec.d = *args.d;
  if (args.informative) spec.informative = *args.informative;
  if (!args.ks.empty()) sc.ks = args.ks;
  if (!args.budgets.empty()) sc.budgets = args.budgets;
  if (args.replicates) sc.replicates = args.replicates;

  if (planted == !csv.empty()) throw UsageError("give exactly one data source: --csv (or dataset=) or --planted");
  if (planted) {
    if (spec.q.size() != 2 || spec.informative >= spec.d || spec.m == 0)
      throw DataError("planted source: need q of length 2, informative < d and m > 0");
    sc.source.data = spec;
    if (sc.source.name.empty()) sc.source.name = "planted";
  } else {
    if (label.empty()) throw UsageError("a CSV source needs --label (or label=)");
    CsvOptions opt;
    opt.bins = bins;
    opt.label_column = label;
    sc.source.data = std::make_shared<const QuantizedDataset>(load_csv(csv, opt));
    if (sc.source.name.empty()) sc.source.name = std::filesystem::path(csv).stem().string();
  }

  const auto probe = sc.source.instance(0);
  for (std::size_t k : sc.ks)
    if (k < 1 || k > probe.features()) throw UsageError("k must lie in [1, " + std::to_string(probe.features()) + "]");
  for (std::size_t b : sc.budgets)
    if (b < 1 || b > probe.rows())
      throw UsageError("budget " + std::to_string(b) + " must lie in [1, " + std::to_string(probe.rows()) + "]");
  if (sc.replicates < 2) throw UsageError("replicates must be at least 2");
  return sc;
}

int run_selection(const SelectionArgs& args, std::vector<Method> methods) {
  const auto sc = selection_scenario(args, std::move(methods));
  const auto rows = run_selection_bench(sc, args.seed, args.threads ? args.threads : default_threads());
  auto out = open_output(std::filesystem::path(args.out) / "selection_results.csv");
  write_selection_csv(out, rows);
  write_selection_csv(std::cout, rows);
  return 0;
}

void add_selection_options(CLI::App* cmd, SelectionArgs& a) {
  cmd->add_option("--config", a.config, "Scenario file (flat key = value)")->check(CLI::ExistingFile);
  cmd->add_option("--csv", a.csv, "Labeled CSV dataset");
  cmd->add_option("--label", a.label, "Label column of the CSV");
  cmd->add_option("--bins", a.bins, "Equal-frequency bins for numeric columns")->check(CLI::PositiveNumber);
  cmd->add_flag("--planted", a.planted, "Use the planted synthetic generator");
  cmd->add_option("--m", a.m, "Planted generator: examples (default 2000)");
  cmd->add_option("--d", a.d, "Planted generator: binary features (default 10)");
  cmd->add_option("--informative", a.informative, "Planted generator: index of the informative feature");
  cmd->add_option("--k", a.ks, "Feature counts to select")->delimiter(',');
  cmd->add_option("--budgets", a.budgets, "Label budgets")->delimiter(',');
  cmd->add_option("--replicates", a.replicates, "Replicates per cell (default 30)");
  cmd->add_option("--delta", a.delta, "Confidence parameter")->check(CLI::Range(1e-12, 1.0 - 1e-12));
  cmd->add_option("--lambda", a.lambda, "Safeguard window, or 'inf'");
  cmd->add_option("--psi", a.psi, "Aggregation")->check(CLI::IsMember({"l1", "l2", "linf"}));
  cmd->add_option("--seed", a.seed, "Master seed");
  cmd->add_option("--out", a.out, "Output directory");
  cmd->add_option("--threads", a.threads, "Worker threads (default: ACTFS_THREADS or all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active feature selection under the mutual-information criterion"};
  app.require_subcommand(1);

  SingleBenchArgs sb;
  auto* single = app.add_subcommand("single-bench", "Single-feature allocation benchmark");
  single->add_option("--config", sb.config, "Scenario file")->required()->check(CLI::ExistingFile);
  single->add_option("--seed", sb.seed, "Master seed");
  single->add_option("--out", sb.out, "Output directory");
  single->add_option("--threads", sb.threads, "Worker threads (default: ACTFS_THREADS or all cores)");

  SelectArgs sel;
  auto* select = app.add_subcommand("select", "Run active feature selection on a CSV file");
  select->add_option("csv", sel.csv, "Input CSV (header row required)")->required();
  select->add_option("--label", sel.label, "Label column (required for the dataset oracle)");
  select->add_option("--bins", sel.bins, "Equal-frequency bins for numeric columns")->check(CLI::PositiveNumber);
  select->add_option("--k", sel.k, "Number of features to select")->required();
  select->add_option("--budget", sel.budget, "Label budget: integer, 'm' or 'all'")->required();
  select->add_option("--delta", sel.delta, "Confidence parameter")->check(CLI::Range(1e-12, 1.0 - 1e-12));
  select->add_option("--lambda", sel.lambda, "Safeguard window, or 'inf'");
  select->add_option("--psi", sel.psi, "Aggregation")->check(CLI::IsMember({"l1", "l2", "linf"}));
  select->add_option("--seed", sel.seed, "Seed for the random fallback");
  select->add_option("--oracle", sel.oracle, "Label source")->check(CLI::IsMember({"dataset", "interactive"}));
  select->add_option("--trace", sel.trace, "Write the per-step trace CSV here");

  SelectionArgs cmp;
  auto* compare = app.add_subcommand("compare", "Compare AFS with the RANDOM and CORESET baselines");
  add_selection_options(compare, cmp);
  SelectionArgs abl;
  auto* ablate = app.add_subcommand("ablate", "Compare AFS with its ablations");
  add_selection_options(ablate, abl);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*single) return run_single_bench(sb);
    if (*select) return run_select(sel);
    if (*compare) return run_selection(cmp, {Method::Afs, Method::Random, Method::Coreset});
    if (*ablate)
      return run_selection(abl, {Method::Single, Method::AvgAll, Method::AvgSel, Method::AfsNoSafeguard, Method::Afs});
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const OracleAborted& e) {
    std::cerr << "aborted: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
