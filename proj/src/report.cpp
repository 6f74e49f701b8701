#include "imbench/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "imbench/results.hpp"

namespace imbench {

namespace {

std::string real(const char* fmt, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

std::string format_rank(double rank) { return real("%.2f", rank); }

std::string render_rank_table(const RankSummary& s) {
  std::ostringstream out;
  out << "### " << to_string(s.metric) << ": " << s.rows << " rows";
  if (s.wilcoxon) {
    out << ", wilcoxon W = " << real("%g", s.statistic);
  } else {
    out << ", friedman chi2 = " << real("%.4g", s.statistic);
  }
  out << ", p = " << real("%.2g", s.p_value);
  if (!s.wilcoxon) {
    out << ", " << to_string(s.method);
    if (s.fell_back) out << " (bergmann-hommel needs at most " << kMaxBergmannHommelColumns << " columns)";
  }
  if (s.dropped_rows > 0) out << ", " << s.dropped_rows << " incomplete rows dropped";
  out << "\n\n| algorithm | rank | group |\n|---|---:|---|\n";
  for (std::size_t j : s.order()) {
    out << "| " << s.columns[j] << " | " << format_rank(s.mean_ranks[j]) << " | " << s.letters[j] << " |\n";
  }
  return out.str();
}

std::string render_pair_table(const std::vector<RankSummary>& pairs) {
  std::ostringstream out;
  out << "| metric | best | rank | other | rank | p.value |\n|---|---|---:|---|---:|---:|\n";
  for (const auto& s : pairs) {
    if (s.columns.size() != 2) throw std::invalid_argument("render_pair_table: summary is not a pair");
    const auto order = s.order();
    out << "| " << to_string(s.metric) << " | " << s.columns[order[0]] << " | "
        << format_rank(s.mean_ranks[order[0]]) << " | " << s.columns[order[1]] << " | "
        << format_rank(s.mean_ranks[order[1]]) << " | " << real("%.2g", s.p_value) << " |\n";
  }
  return out.str();
}

std::string level_file_name(const std::string& name, double rate) {
  return name + "-rate" + format_rate(rate) + ".csv";
}

void write_manifest(std::ostream& out, const std::vector<PreparedLevel>& levels) {
  out << kManifestSchema << '\n' << "rate,status,positives,negatives,file,reason\n";
  for (const auto& l : levels) {
    std::string reason = l.reason;
    for (char& c : reason) {
      if (c == ',' || c == '\n') c = ' ';
    }
    out << format_rate(l.rate) << ',' << (l.written ? "ok" : "skipped") << ',' << l.positives << ','
        << l.negatives << ',' << (l.written ? l.file.filename().string() : "") << ',' << reason << '\n';
  }
}

PrepareResult prepare_dataset(const Dataset& raw, const std::vector<double>& rates, std::uint64_t seed,
                              const std::filesystem::path& outdir) {
  const BinaryDataset binary = binarize(raw);
  const auto levels = nested_levels(binary, rates, seed);
  std::filesystem::create_directories(outdir);

  PrepareResult result;
  for (const auto& level : levels) {
    PreparedLevel p;
    p.rate = level.rate;
    if (level.dataset) {
      p.written = true;
      p.positives = level.dataset->positives();
      p.negatives = level.dataset->negatives();
      p.file = outdir / level_file_name(binary.name, level.rate);
      write_csv(*level.dataset, p.file, raw.label_column);
    } else {
      p.reason = level.skip_reason;
    }
    result.levels.push_back(std::move(p));
  }
  result.manifest = outdir / "manifest.csv";
  std::ofstream out(result.manifest, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + result.manifest.string() + "'");
  write_manifest(out, result.levels);
  return result;
}

}  // namespace imbench
