#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "imbench/results.hpp"
#include "../test_support.hpp"

namespace imbench {
namespace {

CellResult sample_row(int rep, bool ok, double value) {
  CellResult r;
  r.dataset = "d1";
  r.rate = 0.05;
  r.solution = "rf+smote";
  r.strategy = "smote";
  r.classifier = "rf";
  r.metric = MetricKind::gmean;
  r.repetition = rep;
  r.ok = ok;
  r.value = value;
  r.params = {{"mtry", 2}, {"ntree", 123}, {"smote.k", 5}};
  r.seed = 18446744073709551615ull;
  r.message = ok ? "" : "bad, thing\nhappened";
  return r;
}

TEST(Results, FormatRate) {
  EXPECT_EQ(format_rate(0.05), "0.05");
  EXPECT_EQ(format_rate(0.001), "0.001");
  EXPECT_EQ(format_rate(0.1), "0.1");
}

TEST(Results, WriteReadRoundTrip) {
  const auto path = testing::scratch_dir("results") / "r.csv";
  {
    std::ofstream out(path, std::ios::binary);
    write_results_header(out);
    write_result_row(out, sample_row(0, true, 0.1 + 0.2));
    write_result_row(out, sample_row(1, false, 0));
  }
  const auto table = read_results(path);
  ASSERT_EQ(table.rows.size(), 2u);
  const auto& a = table.rows[0];
  EXPECT_EQ(a.value, 0.1 + 0.2);  // bit-exact through %.17g
  EXPECT_EQ(a.params, sample_row(0, true, 0).params);
  EXPECT_EQ(a.seed, 18446744073709551615ull);
  EXPECT_EQ(key_of(a), key_of(sample_row(0, true, 0)));
  const auto& b = table.rows[1];
  EXPECT_FALSE(b.ok);
  EXPECT_EQ(b.message, "bad  thing happened");
}

TEST(Results, IncompleteTrailingLineIgnored) {
  const auto path = testing::scratch_dir("results-partial") / "r.csv";
  std::ostringstream full;
  write_results_header(full);
  write_result_row(full, sample_row(0, true, 0.5));
  write_result_row(full, sample_row(1, true, 0.5));
  const std::string text = full.str();
  std::ofstream(path, std::ios::binary) << text.substr(0, text.size() - 7);
  EXPECT_EQ(read_results(path).rows.size(), 1u);
}

TEST(Results, RejectsForeignFiles) {
  const auto path = testing::scratch_dir("results-foreign") / "r.csv";
  std::ofstream(path, std::ios::binary) << "a,b\n1,2\n";
  EXPECT_THROW(read_results(path), std::runtime_error);
  EXPECT_THROW(read_results(path.parent_path() / "missing.csv"), std::runtime_error);
}

TEST(Results, MeansOverRepetitionsAndFailureFlag) {
  ResultTable t;
  t.rows = {sample_row(0, true, 0.2), sample_row(1, true, 0.4), sample_row(2, true, 0.9)};
  auto other = sample_row(0, false, 0);
  other.solution = "xgb+smote";
  t.rows.push_back(other);
  const auto means = t.means();
  ASSERT_EQ(means.size(), 2u);
  const auto& g = means.at(GroupKey{"d1", 0.05, "rf+smote", MetricKind::gmean});
  EXPECT_NEAR(g.mean, 0.5, 1e-15);
  EXPECT_EQ(g.count, 3);
  EXPECT_FALSE(g.failed);
  EXPECT_TRUE(means.at(GroupKey{"d1", 0.05, "xgb+smote", MetricKind::gmean}).failed);
}

}  // namespace
}  // namespace imbench
