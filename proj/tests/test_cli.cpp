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
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "actfs/dataset.hpp"

namespace actfs {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("actfs_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the CLI with `args`; stdout goes to out_, stderr to err_.
  int run(const std::string& args, const std::string& stdin_from = "/dev/null") {
    const std::string cmd = std::string(ACTFS_CLI_PATH) + " " + args + " < " + stdin_from + " > " +
                            (dir_ / "stdout").string() + " 2> " + (dir_ / "stderr").string();
    const int status = std::system(cmd.c_str());
    out_ = slurp(dir_ / "stdout");
    err_ = slurp(dir_ / "stderr");
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name, std::ios::binary) << text;
    return dir_ / name;
  }

  fs::path planted_csv(std::size_t m = 400, std::size_t informative = 0) {
    std::ostringstream s;
    write_csv(s, planted_dataset(m, 6, informative, {0.05, 0.95}, 11));
    return write("planted.csv", s.str());
  }

  fs::path dir_;
  std::string out_;
  std::string err_;
};

TEST_F(Cli, SelectWithFullBudgetPrintsPlantedFeature) {
  const auto csv = planted_csv();
  EXPECT_EQ(run("select " + csv.string() + " --label label --k 1 --budget m"), 0) << err_;
  EXPECT_EQ(out_, "f0\n");
  EXPECT_EQ(run("select " + planted_csv(400, 3).string() + " --label label --k 2 --budget all --psi linf"), 0);
  EXPECT_NE(out_.find("f3\n"), std::string::npos);
}

TEST_F(Cli, UnknownAggregationIsAUsageError) {
  const auto csv = planted_csv();
  EXPECT_EQ(run("select " + csv.string() + " --label label --k 1 --budget 10 --psi l3"), 1);
  EXPECT_NE(err_.find("--psi"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
  const auto csv = planted_csv();
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("select " + csv.string() + " --label label --k 1 --budget 10 --bogus"), 1);
  EXPECT_EQ(run("select " + csv.string() + " --label label --k 1 --budget 401"), 1);
  EXPECT_NE(err_.find("exceeds"), std::string::npos);
  EXPECT_EQ(run("select " + csv.string() + " --label label --k 7 --budget 10"), 1);
  EXPECT_EQ(run("select " + csv.string() + " --label label --k 1 --budget ten"), 1);
  EXPECT_EQ(run("select " + csv.string() + " --label label --k 1 --budget 10 --lambda 0"), 1);
  EXPECT_EQ(run("select " + csv.string() + " --k 1 --budget 10"), 1);  // dataset oracle needs labels
  EXPECT_EQ(run("select " + csv.string() + " --label label --k 1 --budget 10 --oracle interactive"), 1);
  EXPECT_NE(err_.find("terminal"), std::string::npos);
  EXPECT_EQ(run("compare --planted --csv " + csv.string() + " --label label"), 1);
  EXPECT_EQ(run("compare --planted --budgets 5000"), 1);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, DataErrors) {
  EXPECT_EQ(run("select " + (dir_ / "missing.csv").string() + " --label y --k 1 --budget 1"), 2);
  const auto three = write("three.csv", "f,y\na,1\nb,2\nc,3\n");
  EXPECT_EQ(run("select " + three.string() + " --label y --k 1 --budget 1"), 2);
  const auto ragged = write("ragged.csv", "f,y\na,1\nb\n");
  EXPECT_EQ(run("select " + ragged.string() + " --label y --k 1 --budget 1"), 2);
  const auto bad = write("bad.toml", "scenarios = \"nope\"\n");
  EXPECT_EQ(run("single-bench --config " + bad.string()), 2);
  const auto unknown = write("unknown.toml", "colour = 3\n");
  EXPECT_EQ(run("single-bench --config " + unknown.string()), 2);
}

TEST_F(Cli, TraceFile) {
  const auto csv = planted_csv();
  const auto trace = dir_ / "trace.csv";
  ASSERT_EQ(run("select " + csv.string() + " --label label --k 1 --budget 60 --lambda inf --trace " + trace.string()),
            0)
      << err_;
  std::ifstream in(trace);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,chosen_index,gap_if_known,safeguard_flag");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.rfind(std::to_string(rows) + ",", 0), 0u) << line;
    EXPECT_EQ(line.back(), '0');
  }
  EXPECT_GE(rows, 1u);
  EXPECT_LE(rows, 60u);
}

TEST_F(Cli, SingleBenchIsDeterministic) {
  const auto cfg = write("fixedq.toml",
                         "scenarios = \"custom\"\n"
                         "q = [0.01, 0.5]\n"
                         "q = [0.1, 0.5, 0.3]\n"
                         "p = [0.5, 0.5]\n"
                         "p = [0.2, 0.3, 0.5]\n"
                         "budgets = [20, 40]\n"
                         "replicates = 30\n"
                         "strategies = [\"PROP\", \"I-CP\", \"VAR-B\"]\n");
  ASSERT_EQ(run("single-bench --config " + cfg.string() + " --seed 7 --out " + (dir_ / "a").string()), 0) << err_;
  const std::string tally = out_;
  ASSERT_EQ(run("single-bench --config " + cfg.string() + " --seed 7 --threads 2 --out " + (dir_ / "b").string()), 0);
  EXPECT_EQ(out_, tally);
  const auto a = slurp(dir_ / "a" / "single_feature_results.csv");
  EXPECT_EQ(a, slurp(dir_ / "b" / "single_feature_results.csv"));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1 + 2 * 2 * 3);
  EXPECT_EQ(tally.substr(0, tally.find('\n')), "strategy,clear_wins,wins");
  ASSERT_EQ(run("single-bench --config " + cfg.string() + " --seed 8 --out " + (dir_ / "c").string()), 0);
  EXPECT_NE(a, slurp(dir_ / "c" / "single_feature_results.csv"));
}

TEST_F(Cli, CompareAndAblate) {
  const auto csv = planted_csv();
  ASSERT_EQ(run("compare --csv " + csv.string() + " --label label --k 1,2 --budgets 50,400 --replicates 3 --out " +
                (dir_ / "cmp").string()),
            0)
      << err_;
  const auto table = slurp(dir_ / "cmp" / "selection_results.csv");
  EXPECT_EQ(table, out_);
  EXPECT_EQ(table.substr(0, table.find('\n')), "dataset,method,k,budget,mean_gap,ci_lo,ci_hi");
  EXPECT_NE(table.find("planted,CORESET,2,400,0,0,0\n"), std::string::npos);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 1 + 2 * 2 * 3);

  const auto cfg = write("planted.toml", "planted = 1\nm = 300\nd = 4\ninformative = 2\nks = [1]\n"
                                         "budgets = [100]\nreplicates = 2\nname = \"toy\"\n");
  ASSERT_EQ(run("ablate --config " + cfg.string() + " --out " + (dir_ / "abl").string()), 0) << err_;
  for (const char* m : {"SINGLE", "AVG-ALL", "AVG-SEL", "AFS-NOSG", "AFS"})
    EXPECT_NE(out_.find(std::string("toy,") + m + ",1,100,"), std::string::npos) << m;
  const std::string first = out_;
  ASSERT_EQ(run("ablate --config " + cfg.string() + " --out " + (dir_ / "abl").string()), 0);
  EXPECT_EQ(out_, first);
}

}  // namespace
}  // namespace actfs
