#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "imbench/report.hpp"
#include "../test_support.hpp"

namespace imbench {
namespace {

// Reads the body of a rendered rank table back into name -> (rank, letters).
std::map<std::string, std::pair<double, std::string>> parse_rank_table(const std::string& text) {
  std::map<std::string, std::pair<double, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int table_line = 0;
  while (std::getline(in, line)) {
    if (line.rfind("| ", 0) != 0 && line.rfind("|-", 0) != 0) continue;
    if (++table_line <= 2) continue;  // header and alignment rows
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(line.substr(1));
    while (std::getline(row, cell, '|')) {
      const auto b = cell.find_first_not_of(' ');
      const auto e = cell.find_last_not_of(' ');
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    out[cells.at(0)] = {std::stod(cells.at(1)), cells.at(2)};
  }
  return out;
}

RankSummary sample_summary(std::size_t k) {
  Rng rng(1);
  PerformanceMatrix pm;
  for (std::size_t j = 0; j < k; ++j) pm.column_names.push_back("s" + std::to_string(j));
  for (int i = 0; i < 15; ++i) {
    std::vector<double> row(k);
    for (std::size_t j = 0; j < k; ++j) row[j] = 0.1 * static_cast<double>(j) + rng.uniform() * 0.3;
    pm.values.push_back(row);
    pm.row_names.push_back("r" + std::to_string(i));
  }
  return summarize(pm);
}

TEST(Report, FormatRank) {
  EXPECT_EQ(format_rank(1.0), "1.00");
  EXPECT_EQ(format_rank(2.456), "2.46");
  EXPECT_EQ(format_rank(10.0 / 3.0), "3.33");
}

TEST(Report, RankTableRoundTripsToTwoDecimals) {
  for (std::size_t k : {3u, 4u, 6u}) {
    const auto s = sample_summary(k);
    const std::string text = render_rank_table(s);
    const auto parsed = parse_rank_table(text);
    ASSERT_EQ(parsed.size(), k) << text;
    for (std::size_t j = 0; j < k; ++j) {
      const auto& [rank, letters] = parsed.at(s.columns[j]);
      EXPECT_LE(std::fabs(rank - s.mean_ranks[j]), 0.005 + 1e-12);
      EXPECT_EQ(letters, s.letters[j]);
    }
    // Rows appear best first.
    const auto first_row = text.find("| s", text.find("|---"));
    EXPECT_EQ(text.substr(first_row + 2, s.columns[s.order()[0]].size()), s.columns[s.order()[0]]);
    EXPECT_EQ(text.find("bergmann-hommel needs at most") != std::string::npos, k > 5);
  }
}

TEST(Report, HeaderMentionsRowsAndDrops) {
  auto s = sample_summary(3);
  s.dropped_rows = 2;
  const std::string text = render_rank_table(s);
  EXPECT_EQ(text.rfind("### auc: 15 rows, friedman chi2 = ", 0), 0u) << text;
  EXPECT_NE(text.find(", 2 incomplete rows dropped"), std::string::npos);
  EXPECT_NE(text.find("| algorithm | rank | group |\n|---|---:|---|\n"), std::string::npos);
}

TEST(Report, PairTable) {
  auto s = sample_summary(2);
  s.metric = MetricKind::gmean;
  const std::string text = render_pair_table({s});
  EXPECT_EQ(text.rfind("| metric | best | rank | other | rank | p.value |\n", 0), 0u);
  const auto o = s.order();
  EXPECT_NE(text.find("| gmean | " + s.columns[o[0]] + " | " + format_rank(s.mean_ranks[o[0]]) + " | " +
                      s.columns[o[1]]),
            std::string::npos)
      << text;
  EXPECT_THROW(render_pair_table({sample_summary(3)}), std::invalid_argument);
}

TEST(Prepare, NestedFilesAndManifest) {
  const auto dir = testing::scratch_dir("prepare");
  {
    std::ofstream csv(dir / "raw.csv");
    csv << "a,b,kind\n";
    for (int i = 0; i < 1200; ++i) csv << i << ',' << (i % 7) << ',' << (i < 200 ? "yes" : "no") << '\n';
  }
  const Dataset raw = load_csv(dir / "raw.csv", "kind", std::string("yes"));
  const auto result = prepare_dataset(raw, {0.05, 0.03, 0.01, 0.001}, 3, dir / "out");
  ASSERT_EQ(result.levels.size(), 4u);
  const std::size_t expected_pos[] = {52, 30, 10};
  for (int i = 0; i < 3; ++i) {
    const auto& l = result.levels[static_cast<std::size_t>(i)];
    EXPECT_TRUE(l.written);
    EXPECT_EQ(l.positives, expected_pos[i]);
    EXPECT_EQ(l.negatives, 1000u);
    const auto back = binarize(load_csv(l.file, "kind", std::string("positive")));
    EXPECT_EQ(back.positives(), expected_pos[i]);
    EXPECT_EQ(back.size(), expected_pos[i] + 1000);
  }
  EXPECT_EQ(result.levels[0].file.filename(), level_file_name("raw", 0.05));
  EXPECT_EQ(level_file_name("raw", 0.05), "raw-rate0.05.csv");
  EXPECT_FALSE(result.levels[3].written);
  EXPECT_FALSE(result.levels[3].reason.empty());

  const std::string manifest = testing::slurp(result.manifest);
  std::istringstream in(manifest);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kManifestSchema);
  std::getline(in, line);
  EXPECT_EQ(line, "rate,status,positives,negatives,file,reason");
  std::getline(in, line);
  EXPECT_EQ(line, "0.05,ok,52,1000,raw-rate0.05.csv,");
  std::getline(in, line);
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(line.rfind("0.001,skipped,", 0), 0u) << line;
}

}  // namespace
}  // namespace imbench
