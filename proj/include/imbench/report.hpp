#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "imbench/data.hpp"
#include "imbench/stats.hpp"

namespace imbench {

/// Two decimals, as ranks are shown in the tables.
std::string format_rank(double rank);

/// Markdown table of a RankSummary, rows sorted by mean rank:
///
///   ### auc: 30 rows, friedman chi2 = 12.5, p = 0.0058, bergmann-hommel
///
///   | algorithm | rank | group |
///   |---|---:|---|
///   | underbagging | 1.46 | a |
std::string render_rank_table(const RankSummary& summary);

/// One line per two-column summary:
///   | metric | best | rank | other | rank | p.value |
/// where "best" is the column with the lower mean rank.
std::string render_pair_table(const std::vector<RankSummary>& pairs);

// --- dataset preparation ---------------------------------------------------

inline constexpr const char* kManifestSchema = "# imbench-manifest v1";

struct PreparedLevel {
  double rate = 0.0;
  bool written = false;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::filesystem::path file;
  std::string reason;
};

struct PrepareResult {
  std::vector<PreparedLevel> levels;
  std::filesystem::path manifest;
};

/// File name for one rate: "<name>-rate<rate>.csv".
std::string level_file_name(const std::string& name, double rate);

/// Binarizes `raw`, builds nested imbalance levels for `rates` (fractions)
/// and writes one CSV per reachable level plus manifest.csv into `outdir`.
/// Unreachable levels are listed in the manifest with their reason.
PrepareResult prepare_dataset(const Dataset& raw, const std::vector<double>& rates, std::uint64_t seed,
                              const std::filesystem::path& outdir);

/// Manifest layout: the schema line, then
///   rate,status,positives,negatives,file,reason
void write_manifest(std::ostream& out, const std::vector<PreparedLevel>& levels);

}  // namespace imbench
