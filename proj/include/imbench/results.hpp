#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "imbench/classifiers.hpp"
#include "imbench/metrics.hpp"

namespace imbench {

/// Outcome of one repetition of one (dataset, rate, solution, metric) cell.
struct CellResult {
  std::string dataset;
  double rate = 0.0;
  std::string solution;
  std::string strategy;
  /// Empty for solutions without a base classifier (rusboost).
  std::string classifier;
  MetricKind metric = MetricKind::acc;
  int repetition = 0;
  bool ok = false;
  double value = 0.0;
  ParamMap params;
  std::uint64_t seed = 0;
  std::string message;
};

/// Identifies a result row for resumption.
using CellKey = std::tuple<std::string, std::string, std::string, std::string, int>;

CellKey key_of(const CellResult& r);
std::string format_rate(double rate);

struct GroupKey {
  std::string dataset;
  double rate = 0.0;
  std::string solution;
  MetricKind metric = MetricKind::acc;
  auto operator<=>(const GroupKey&) const = default;
};

struct GroupMean {
  std::string strategy;
  std::string classifier;
  double mean = 0.0;
  int count = 0;
  bool failed = false;
};

struct ResultTable {
  std::vector<CellResult> rows;

  /// Arithmetic mean over repetitions per (dataset, rate, solution, metric).
  /// A group with any failed repetition is flagged failed.
  std::map<GroupKey, GroupMean> means() const;
};

/// Results file: a schema line "# imbench-results v1", a header row
///   dataset,rate,solution,strategy,classifier,metric,repetition,status,
///   value,seed,params,message
/// then one row per CellResult. status is ok or failed; value is empty on
/// failure; params is "name=value;..." in key order; reals use %.17g.
inline constexpr const char* kResultsSchema = "# imbench-results v1";

void write_results_header(std::ostream& out);
void write_result_row(std::ostream& out, const CellResult& r);

/// Reads a results file. Incomplete trailing lines are ignored.
ResultTable read_results(const std::filesystem::path& path);

}  // namespace imbench
