#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "imbench/metrics.hpp"
#include "imbench/results.hpp"

namespace imbench {

/// Blocks (datasets) by algorithms. No missing entries.
struct PerformanceMatrix {
  std::vector<std::string> row_names;
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> values;
  bool higher_is_better = true;

  std::size_t rows() const { return values.size(); }
  std::size_t cols() const { return column_names.size(); }
};

/// Ranks within one row, 1 = best, ties get the average rank.
std::vector<double> rank_row(std::span<const double> values, bool higher_is_better = true);

struct FriedmanResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::vector<double> mean_ranks;
};

FriedmanResult friedman(const PerformanceMatrix& pm);

enum class PosthocMethod { bergmann_hommel, holm };

std::string to_string(PosthocMethod method);

/// Largest number of columns for which Bergmann-Hommel is enumerated.
inline constexpr std::size_t kMaxBergmannHommelColumns = 5;

struct PosthocResult {
  /// The method actually applied.
  PosthocMethod method = PosthocMethod::holm;
  /// True when bergmann_hommel was requested but k was too large.
  bool fell_back = false;
  std::vector<double> mean_ranks;
  /// k x k, symmetric; the diagonal is 0 for z and 1 for p-values.
  std::vector<std::vector<double>> z;
  std::vector<std::vector<double>> raw_p;
  std::vector<std::vector<double>> adjusted_p;
};

PosthocResult pairwise_posthoc(const PerformanceMatrix& pm,
                               PosthocMethod method = PosthocMethod::bergmann_hommel);

/// Holm step-down adjustment, returned in input order.
std::vector<double> holm_adjust(std::span<const double> p);

/// All pairs (i < j) of k items in lexicographic order.
std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t k);

/// Exhaustive sets for k items: the distinct non-empty sets of pairwise
/// equality hypotheses that can hold together (one per set partition of the
/// items). Each set holds indices into all_pairs(k).
std::vector<std::vector<std::size_t>> exhaustive_sets(std::size_t k);

/// Bergmann-Hommel adjustment of the pairwise p-values (ordered as
/// all_pairs(k)): max over exhaustive sets I containing the hypothesis of
/// |I| * min p over I, capped at 1.
std::vector<double> bergmann_hommel_adjust(std::size_t k, std::span<const double> p);

struct WilcoxonResult {
  double w_plus = 0.0;
  double w_minus = 0.0;
  /// min(w_plus, w_minus)
  double statistic = 0.0;
  double p_value = 1.0;
  /// Non-zero differences used.
  std::size_t n = 0;
  bool exact = false;
};

inline constexpr std::size_t kWilcoxonExactLimit = 25;
inline constexpr std::size_t kWilcoxonMinPairs = 5;

/// Two-sided signed-rank test on a - b. Zero differences are dropped; tied
/// |differences| get average ranks. Exact null distribution for n <= 25,
/// otherwise the normal approximation with tie and continuity correction.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

/// Letters per column such that two columns share a letter iff sig[i][j]
/// is false. Letters are ordered by mean rank (the best column gets "a").
std::vector<std::string> letter_display(std::span<const double> mean_ranks,
                                        const std::vector<std::vector<bool>>& sig);

enum class Grouping { strategies, combinations, pair };

/// Which slice of a result table to compare.
///  strategies:   columns are strategies, rows dataset x rate x classifier
///                (rusboost, which has no classifier, is repeated on every
///                classifier row)
///  combinations: columns are solutions, rows dataset x rate
///  pair:         columns a and b, rows dataset x rate
/// Empty filters select everything; rusboost ignores the classifier filter.
struct ComparisonQuestion {
  MetricKind metric = MetricKind::auc;
  Grouping grouping = Grouping::strategies;
  std::string a;
  std::string b;
  std::vector<double> rates;
  std::vector<std::string> datasets;
  std::vector<std::string> classifiers;
  std::vector<std::string> strategies;
  double alpha = 0.05;
  PosthocMethod method = PosthocMethod::bergmann_hommel;
};

struct RankSummary {
  MetricKind metric = MetricKind::auc;
  std::vector<std::string> columns;
  std::vector<double> mean_ranks;
  std::size_t rows = 0;
  /// Rows removed because some column was missing or failed.
  std::size_t dropped_rows = 0;
  /// Friedman for three or more columns, Wilcoxon for two.
  bool wilcoxon = false;
  double statistic = 0.0;
  double p_value = 1.0;
  PosthocMethod method = PosthocMethod::holm;
  bool fell_back = false;
  std::vector<std::vector<double>> adjusted_p;
  std::vector<std::string> letters;
  double alpha = 0.05;

  /// Column indices by increasing mean rank (ties by name).
  std::vector<std::size_t> order() const;
};

PerformanceMatrix build_matrix(const ResultTable& rt, const ComparisonQuestion& question,
                               std::size_t* dropped_rows = nullptr);

RankSummary summarize(const PerformanceMatrix& pm, PosthocMethod method = PosthocMethod::bergmann_hommel,
                      double alpha = 0.05);

RankSummary compare(const ResultTable& rt, const ComparisonQuestion& question);

}  // namespace imbench
