#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "imbench/results.hpp"
#include "../test_support.hpp"

namespace imbench {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(const fs::path& dir, const std::string& args, const std::string& env = "") {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = env + " \"" + std::string(IMBENCH_CLI) + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testing::slurp(out);
  r.err = testing::slurp(err);
  return r;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string grid_config(const std::string& output, const std::string& extra = "") {
  return R"({
    "datasets": [
      {"synthetic": {"family": "gaussians", "n": 240, "dim": 2, "overlap": 0.6, "rate": 0.1, "seed": 1}, "name": "g1"},
      {"synthetic": {"family": "clusters", "n": 240, "dim": 2, "overlap": 0.5, "rate": 0.1, "seed": 2}, "name": "c1"},
      {"synthetic": {"family": "gaussians", "n": 240, "dim": 3, "overlap": 0.7, "rate": 0.1, "seed": 3}, "name": "g2"},
      {"synthetic": {"family": "clusters", "n": 240, "dim": 3, "overlap": 0.8, "rate": 0.1, "seed": 4}, "name": "c2"},
      {"synthetic": {"family": "gaussians", "n": 240, "dim": 2, "overlap": 0.8, "rate": 0.1, "seed": 5}, "name": "g3"}
    ],
    "rates": [0.1, 0.05],
    "metrics": ["auc", "bac"],
    "strategies": ["baseline", "weight", "underbagging"],
    "classifiers": ["cart", "1nn"],
    "space": {"underbagging.n": 5},
    "repetitions": 2,
    "master_seed": 3,
    "output_path": ")" + output + "\"" + extra + "\n}";
}

TEST(Cli, UsageErrors) {
  const auto dir = testing::scratch_dir("cli-usage");
  EXPECT_NE(cli(dir, "").code, 0);
  EXPECT_NE(cli(dir, "frobnicate").code, 0);
  EXPECT_NE(cli(dir, "synth --out x.csv --rate 80").code, 0);
  EXPECT_NE(cli(dir, "run --config /nonexistent.json").code, 0);
}

TEST(Cli, PrepareWritesNestedLevelsAndManifest) {
  const auto dir = testing::scratch_dir("cli-prepare");
  std::string csv = "f1,f2,target\n";
  for (int i = 0; i < 1200; ++i) {
    csv += std::to_string(i * 0.5) + "," + std::to_string(i % 11) + "," + (i % 6 == 0 ? "pos" : "neg") + "\n";
  }
  write(dir / "raw.csv", csv);
  const auto r = cli(dir, "prepare --input \"" + (dir / "raw.csv").string() +
                              "\" --label target --positive pos --rates 5,3,1,0.1 --seed 4 --outdir \"" +
                              (dir / "out").string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0.05: 52 positives, 1000 negatives"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("0.03: 30 positives"), std::string::npos);
  EXPECT_NE(r.out.find("0.01: 10 positives"), std::string::npos);
  EXPECT_NE(r.out.find("0.001: skipped"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "out" / "raw-rate0.05.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "raw-rate0.01.csv"));
  EXPECT_FALSE(fs::exists(dir / "out" / "raw-rate0.001.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "manifest.csv"));
}

TEST(Cli, SynthThenRunResumeReportCompare) {
  const auto dir = testing::scratch_dir("cli-run");
  const auto r = cli(dir, "synth --family clusters --n 300 --dim 3 --overlap 0.5 --rate 10 --seed 9 --out \"" +
                              (dir / "blob.csv").string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("300 rows, 30 positives"), std::string::npos) << r.out;

  write(dir / "one.json", R"({"datasets": [{"path": "blob.csv"}], "rates": [0.05], "metrics": ["auc"],
    "solutions": [{"strategy": "baseline", "classifier": "cart"}], "repetitions": 3, "output_path": "one.csv"})");
  const auto first = cli(dir, "run --config \"" + (dir / "one.json").string() + "\"");
  ASSERT_EQ(first.code, 0) << first.err;
  const auto table = read_results(dir / "one.csv");
  ASSERT_EQ(table.rows.size(), 3u);
  EXPECT_EQ(table.rows[0].dataset, "blob");
  EXPECT_EQ(table.rows[0].solution, "cart+baseline");
  const auto again = cli(dir, "run --config \"" + (dir / "one.json").string() + "\"");
  EXPECT_EQ(again.code, 0);
  EXPECT_NE(again.err.find("0 cells executed, 3 already present"), std::string::npos) << again.err;

  write(dir / "grid.json", grid_config("grid.csv"));
  const auto grid = cli(dir, "run --config \"" + (dir / "grid.json").string() + "\" --threads 2");
  ASSERT_EQ(grid.code, 0) << grid.err;
  const std::string results = "--results \"" + (dir / "grid.csv").string() + "\"";

  const auto report = cli(dir, "report " + results + " --metric auc --rates 10");
  ASSERT_EQ(report.code, 0) << report.err;
  EXPECT_NE(report.out.find("### auc: 10 rows, friedman chi2 = "), std::string::npos) << report.out;
  EXPECT_NE(report.out.find("| underbagging | "), std::string::npos);

  const auto both = cli(dir, "report " + results + " --group combinations --method holm");
  ASSERT_EQ(both.code, 0) << both.err;
  EXPECT_NE(both.out.find("### auc: 10 rows"), std::string::npos) << both.out;
  EXPECT_NE(both.out.find("### bac: 10 rows"), std::string::npos);
  EXPECT_NE(both.out.find("holm"), std::string::npos);
  EXPECT_NE(both.out.find("| 1nn+weight | "), std::string::npos);

  const auto pair = cli(dir, "compare " + results + " --a cart+baseline --b cart+underbagging --metric auc,bac");
  ASSERT_EQ(pair.code, 0) << pair.err;
  EXPECT_EQ(pair.out.rfind("| metric | best | rank | other | rank | p.value |", 0), 0u) << pair.out;
  EXPECT_NE(pair.out.find("| auc | "), std::string::npos);
  EXPECT_NE(pair.out.find("| bac | "), std::string::npos);

  const auto empty = cli(dir, "report " + results + " --datasets nothing");
  EXPECT_EQ(empty.code, 2);
  EXPECT_NE(empty.err.find("empty selection"), std::string::npos) << empty.err;
}

TEST(Cli, MissingDatasetFailsBeforeRunning) {
  const auto dir = testing::scratch_dir("cli-missing");
  write(dir / "bad.json", R"({"datasets": [{"path": "absent.csv"}], "rates": [0.05], "metrics": ["auc"],
    "strategies": ["baseline"], "classifiers": ["cart"], "output_path": "bad.csv"})");
  const auto r = cli(dir, "run --config \"" + (dir / "bad.json").string() + "\"");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("absent.csv"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "bad.csv"));
}

TEST(Cli, ResultsIndependentOfThreadCount) {
  const auto dir = testing::scratch_dir("cli-threads");
  write(dir / "a.json", grid_config("a.csv"));
  write(dir / "b.json", grid_config("b.csv"));
  ASSERT_EQ(cli(dir, "run --config \"" + (dir / "a.json").string() + "\"", "IMBENCH_THREADS=1").code, 0);
  ASSERT_EQ(cli(dir, "run --config \"" + (dir / "b.json").string() + "\" --threads 3").code, 0);
  const std::string a = testing::slurp(dir / "a.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, testing::slurp(dir / "b.csv"));
}

}  // namespace
}  // namespace imbench
