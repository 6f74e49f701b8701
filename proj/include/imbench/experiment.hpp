#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "imbench/classifiers.hpp"
#include "imbench/data.hpp"
#include "imbench/metrics.hpp"
#include "imbench/results.hpp"
#include "imbench/strategies.hpp"

namespace imbench {

// --- hyperparameter search -------------------------------------------------

enum class ParamScale { integer, log_integer, real, log_real, choice };

/// One searchable parameter. integer/log_integer/real/log_real draw from
/// [lo, hi] (log scales uniformly in log space); choice draws uniformly
/// from `choices`. With hi_is_dim the upper bound is the data dimension.
struct ParamDomain {
  std::string name;
  ParamScale scale = ParamScale::choice;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> choices;
  bool hi_is_dim = false;
};

using SearchSpace = std::vector<ParamDomain>;

/// Replaces hi_is_dim bounds with `dim`.
SearchSpace resolve(SearchSpace space, std::size_t dim);

/// `count` independent draws, deterministic per seed. An empty space yields
/// a single empty map.
std::vector<ParamMap> sample_hyperparameters(const SearchSpace& space, int count, std::uint64_t seed);

/// A (strategy, base classifier) combination plus its search space.
struct SolutionSpec {
  std::string id;
  StrategySpec strategy;
  ClassifierSpec classifier;
  SearchSpace space;

  bool has_classifier() const { return strategy.kind != StrategyKind::rusboost; }
};

/// Default space: random_forest mtry in [1, d], ntree log-uniform in
/// [16, 4096]; gradient_boosting max_depth in [1, 6], eta log-uniform in
/// [0.005, 0.05], nrounds in {20, 40, ..., 140}; cart and one_nn none.
/// underbagging adds underbagging.n and rusboost uses rusboost.nboost, both
/// from {10, 20, 30, 40, 60}; smote fixes smote.k = 5.
/// The id is "<classifier>+<strategy>" in short names, or "rusboost".
SolutionSpec make_solution(StrategyKind strategy, ClassifierKind classifier = ClassifierKind::cart);

/// Routes a sampled parameter map into the solution (strategy.* keys go to
/// the strategy, the rest to the classifier) and trains it.
ModelPtr fit_candidate(const SolutionSpec& solution, const ParamMap& params,
                       const BinaryDataset& train, std::uint64_t seed);

struct TuneResult {
  ParamMap best;
  std::size_t best_index = 0;
  std::vector<ParamMap> candidates;
  std::vector<double> mean_scores;
};

/// Random search with stratified k-fold validation; the best mean
/// validation metric wins, earliest candidate on ties.
TuneResult tune_detailed(const SolutionSpec& solution, const BinaryDataset& train, MetricKind metric,
                         int folds, int candidates, std::uint64_t seed);

ParamMap tune(const SolutionSpec& solution, const BinaryDataset& train, MetricKind metric,
              int folds = 3, int candidates = 10, std::uint64_t seed = 0);

// --- protocol ----------------------------------------------------------------

struct ProtocolSettings {
  int candidates = 10;
  double threshold = 0.5;
};

/// One repetition: holdout split from plan (seeded by plan.seed), tuning
/// on the training part, refit on the whole training part, evaluation on
/// the test part with the tuning metric. Errors are captured in the result.
CellResult run_repetition(const BinaryDataset& ds, double rate, const SolutionSpec& solution,
                          MetricKind metric, const SplitPlan& plan, int repetition,
                          std::uint64_t seed, const ProtocolSettings& settings = {});

/// All repetitions of a cell; repetition r uses derive_seed(seed, r).
std::vector<CellResult> run_cell(const BinaryDataset& ds, const SolutionSpec& solution,
                                 MetricKind metric, const SplitPlan& plan, std::uint64_t seed = 0,
                                 const ProtocolSettings& settings = {});

// --- configuration and grid ------------------------------------------------

struct DatasetSource {
  std::string name;
  std::optional<std::filesystem::path> path;
  std::string label_column = "class";
  std::optional<std::string> positive_label;
  std::optional<SyntheticSpec> synthetic;
};

/// Experiment configuration, read from JSON:
///   datasets:     [{path, label, positive_label?, name?} | {synthetic: {family,
///                  n, dim, overlap, rate, seed}, name?}]
///   rates:        [0.05, ...]
///   solutions:    [{strategy, classifier?, space?}] or, instead,
///   strategies + classifiers (cross product; rusboost once) with an
///                 optional shared "space" override
///   metrics:      ["auc", "acc", ...]
///   repetitions, inner_folds, candidates, test_fraction, master_seed,
///   output_path, threads (optional)
/// A space override maps a parameter name to a number (fixed value), a list
/// (choices) or {scale, lo, hi} / {choices}.
struct ExperimentConfig {
  std::vector<DatasetSource> datasets;
  std::vector<double> rates;
  std::vector<SolutionSpec> solutions;
  std::vector<MetricKind> metrics;
  int repetitions = 3;
  int inner_folds = 3;
  int candidates = 10;
  double test_fraction = 0.2;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_path = "results.csv";
  int threads = 0;
};

/// Parses and validates a config (dataset files must exist). Relative paths
/// are resolved against `base_dir`. Errors carry the JSON line number when
/// the text does not parse.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

struct GridOptions {
  /// 0 = IMBENCH_THREADS or the hardware concurrency.
  int threads = 0;
  std::ostream* log = nullptr;
};

struct GridReport {
  ResultTable table;
  std::size_t executed = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
  /// "dataset @ rate: reason" for every excluded dataset level.
  std::vector<std::string> exclusions;
};

int default_thread_count();

/// Executes every (dataset, rate, solution, metric, repetition) not already
/// in the output file, appending rows in a fixed canonical order, so the
/// file content depends only on the config. The holdout split depends on
/// (master seed, dataset, rate) only, so all solutions see the same splits.
GridReport run_grid(const ExperimentConfig& config, const GridOptions& options = {});

}  // namespace imbench
