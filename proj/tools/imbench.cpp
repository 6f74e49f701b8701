// imbench: prepare datasets, run benchmark grids, and rank the results.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "imbench/data.hpp"
#include "imbench/experiment.hpp"
#include "imbench/report.hpp"
#include "imbench/results.hpp"
#include "imbench/stats.hpp"

namespace {

using namespace imbench;

// Exit codes.
constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kCellsFailed = 3;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Rates are given in percent on the command line.
std::vector<double> parse_percentages(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !(v > 0.0 && v <= 50.0)) {
      throw std::invalid_argument("rate '" + item + "' must be a percentage in (0, 50]");
    }
    out.push_back(v / 100.0);
  }
  if (out.empty()) throw std::invalid_argument("no rates given");
  return out;
}

std::vector<MetricKind> parse_metrics(const std::string& s) {
  std::vector<MetricKind> out;
  for (const auto& item : split_list(s)) out.push_back(parse_metric(item));
  return out;
}

struct PrepareArgs {
  std::string input;
  std::string label = "class";
  std::string positive;
  std::string rates = "5,3,1,0.1";
  std::uint64_t seed = 0;
  std::string outdir;
};

int cmd_prepare(const PrepareArgs& a) {
  const auto rates = parse_percentages(a.rates);
  Dataset raw = load_csv(a.input, a.label,
                         a.positive.empty() ? std::nullopt : std::optional<std::string>(a.positive));
  const auto result = prepare_dataset(raw, rates, a.seed, a.outdir);
  for (const auto& l : result.levels) {
    if (l.written) {
      std::cout << format_rate(l.rate) << ": " << l.positives << " positives, " << l.negatives
                << " negatives -> " << l.file.string() << '\n';
    } else {
      std::cout << format_rate(l.rate) << ": skipped (" << l.reason << ")\n";
    }
  }
  std::cout << "manifest: " << result.manifest.string() << '\n';
  return kOk;
}

struct SynthArgs {
  std::string family = "gaussians";
  std::size_t n = 1000;
  std::size_t dim = 2;
  double overlap = 0.0;
  double rate = 5.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_synth(const SynthArgs& a) {
  SyntheticSpec spec;
  spec.family = parse_synthetic_family(a.family);
  spec.n = a.n;
  spec.dim = a.dim;
  spec.overlap = a.overlap;
  if (!(a.rate > 0.0 && a.rate <= 50.0)) throw std::invalid_argument("--rate must be a percentage in (0, 50]");
  spec.rate = a.rate / 100.0;
  spec.seed = a.seed;
  spec.name = std::filesystem::path(a.out).stem().string();
  const auto ds = make_synthetic(spec);
  write_csv(ds, a.out);
  std::cout << a.out << ": " << ds.size() << " rows, " << ds.positives() << " positives\n";
  return kOk;
}

int cmd_run(const std::string& config_path, int threads) {
  const ExperimentConfig config = load_config(config_path);
  GridOptions options;
  options.threads = threads;
  options.log = &std::cerr;
  const GridReport report = run_grid(config, options);
  std::cout << "results: " << config.output_path.string() << " (" << report.table.rows.size()
            << " rows)\n";
  return report.failed == 0 ? kOk : kCellsFailed;
}

struct ReportArgs {
  std::string results;
  std::string metrics;
  std::string group = "strategies";
  std::string rates;
  std::string datasets;
  std::string classifiers;
  std::string strategies;
  std::string method = "bergmann-hommel";
  double alpha = 0.05;
  std::string a;
  std::string b;
};

ComparisonQuestion base_question(const ReportArgs& r) {
  ComparisonQuestion q;
  if (!r.rates.empty()) q.rates = parse_percentages(r.rates);
  q.datasets = split_list(r.datasets);
  q.classifiers = split_list(r.classifiers);
  q.strategies = split_list(r.strategies);
  q.method = r.method == "holm" ? PosthocMethod::holm : PosthocMethod::bergmann_hommel;
  q.alpha = r.alpha;
  return q;
}

std::vector<MetricKind> metrics_or_present(const std::string& list, const ResultTable& table) {
  if (!list.empty()) return parse_metrics(list);
  std::vector<MetricKind> out;
  for (const auto& row : table.rows) {
    if (std::find(out.begin(), out.end(), row.metric) == out.end()) out.push_back(row.metric);
  }
  return out;
}

int cmd_report(const ReportArgs& r) {
  const ResultTable table = read_results(r.results);
  ComparisonQuestion q = base_question(r);
  q.grouping = r.group == "combinations" ? Grouping::combinations : Grouping::strategies;
  int rendered = 0;
  std::vector<RankSummary> pairs;
  for (MetricKind m : metrics_or_present(r.metrics, table)) {
    q.metric = m;
    try {
      const RankSummary s = compare(table, q);
      std::cout << render_rank_table(s) << '\n';
      if (s.wilcoxon) pairs.push_back(s);
      ++rendered;
    } catch (const std::invalid_argument& e) {
      std::cerr << to_string(m) << ": " << e.what() << '\n';
    }
  }
  if (!pairs.empty()) std::cout << render_pair_table(pairs);
  return rendered > 0 ? kOk : kUsage;
}

int cmd_compare(const ReportArgs& r) {
  const ResultTable table = read_results(r.results);
  ComparisonQuestion q = base_question(r);
  q.grouping = Grouping::pair;
  q.a = r.a;
  q.b = r.b;
  std::vector<RankSummary> pairs;
  for (MetricKind m : metrics_or_present(r.metrics, table)) {
    q.metric = m;
    try {
      pairs.push_back(compare(table, q));
    } catch (const std::invalid_argument& e) {
      std::cerr << to_string(m) << ": " << e.what() << '\n';
    }
  }
  if (pairs.empty()) return kUsage;
  std::cout << render_pair_table(pairs);
  return kOk;
}

void add_selection_flags(CLI::App* cmd, ReportArgs& r) {
  cmd->add_option("--results", r.results, "results CSV written by run")->required()->check(CLI::ExistingFile);
  cmd->add_option("--metric", r.metrics, "comma-separated metrics (default: all present)");
  cmd->add_option("--rates", r.rates, "only these rates, in percent");
  cmd->add_option("--datasets", r.datasets, "only these datasets");
  cmd->add_option("--classifiers", r.classifiers, "only these base classifiers");
  cmd->add_option("--strategies", r.strategies, "only these strategies");
  cmd->add_option("--alpha", r.alpha, "significance level")->check(CLI::Range(0.0, 1.0));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imbench: benchmark strategies for imbalanced binary classification"};
  app.require_subcommand(1);

  PrepareArgs prep;
  auto* prepare = app.add_subcommand("prepare", "binarize a CSV and write nested imbalanced versions");
  prepare->add_option("--input", prep.input, "input CSV")->required()->check(CLI::ExistingFile);
  prepare->add_option("--label", prep.label, "label column");
  prepare->add_option("--positive", prep.positive, "label value to treat as positive");
  prepare->add_option("--rates", prep.rates, "comma-separated rates in percent");
  prepare->add_option("--seed", prep.seed, "random seed");
  prepare->add_option("--outdir", prep.outdir, "output directory")->required();

  SynthArgs syn;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--family", syn.family, "gaussians or clusters");
  synth->add_option("--n", syn.n, "number of rows")->check(CLI::PositiveNumber);
  synth->add_option("--dim", syn.dim, "number of features")->check(CLI::PositiveNumber);
  synth->add_option("--overlap", syn.overlap, "class overlap")->check(CLI::NonNegativeNumber);
  synth->add_option("--rate", syn.rate, "positive rate in percent");
  synth->add_option("--seed", syn.seed, "random seed");
  synth->add_option("--out", syn.out, "output CSV")->required();

  std::string config_path;
  int threads = 0;
  auto* run = app.add_subcommand("run", "run (or resume) an experiment grid");
  run->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--threads", threads, "worker threads (default: IMBENCH_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "rank strategies or combinations per metric");
  add_selection_flags(report, rep);
  report->add_option("--group", rep.group, "strategies or combinations")
      ->check(CLI::IsMember({"strategies", "combinations"}));
  report->add_option("--method", rep.method, "post-hoc adjustment")
      ->check(CLI::IsMember({"bergmann-hommel", "holm"}));

  ReportArgs cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Wilcoxon comparison of two solutions");
  add_selection_flags(compare_cmd, cmp);
  compare_cmd->add_option("--a", cmp.a, "first solution id")->required();
  compare_cmd->add_option("--b", cmp.b, "second solution id")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prepare) return cmd_prepare(prep);
    if (*synth) return cmd_synth(syn);
    if (*run) return cmd_run(config_path, threads);
    if (*report) return cmd_report(rep);
    if (*compare_cmd) return cmd_compare(cmp);
  } catch (const std::exception& e) {
    std::cerr << "imbench: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
