#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "imbench/data.hpp"

namespace imbench {

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Real-valued scores (higher means more positive) paired with true labels.
struct ScoredPredictions {
  std::vector<double> scores;
  std::vector<Label> truth;
};

enum class MetricKind { acc, auc, f1, gmean, mcc, bac, precision, recall, specificity };

/// The six quality metrics used for model selection and comparison.
inline constexpr MetricKind kQualityMetrics[] = {MetricKind::auc,  MetricKind::acc,
                                                 MetricKind::f1,   MetricKind::gmean,
                                                 MetricKind::mcc,  MetricKind::bac};

std::string to_string(MetricKind kind);
MetricKind parse_metric(const std::string& name);

/// Lower bound of the metric's range (-1 for mcc, 0 otherwise); upper is 1.
double metric_lower_bound(MetricKind kind);

enum class TiePolicy { zero, half };

ConfusionMatrix confusion(std::span<const Label> truth, std::span<const Label> predicted);

double precision(const ConfusionMatrix& cm);
double recall(const ConfusionMatrix& cm);
double specificity(const ConfusionMatrix& cm);

/// Threshold metrics. Undefined denominators yield 0: precision with no
/// predicted positives, f1 with TP = 0, mcc with any empty marginal.
double score_metric(MetricKind kind, const ConfusionMatrix& cm);

/// Fraction of (positive, negative) pairs where the positive scores higher;
/// tied pairs count 0 or 1/2 according to the policy. O(n log n).
double auc(const ScoredPredictions& sp, TiePolicy ties = TiePolicy::zero);

/// Literal double loop over all pairs. Reference implementation.
double auc_pairwise(const ScoredPredictions& sp, TiePolicy ties = TiePolicy::zero);

/// Mann-Whitney form: (sum of positive ranks - P(P+1)/2) / (P N), average
/// ranks for ties. Equals the half-tie pairwise AUC.
double auc_rank_sum(const ScoredPredictions& sp);

std::vector<Label> threshold_labels(std::span<const double> scores, double threshold);

/// auc ignores the threshold; other metrics label score >= threshold positive.
double evaluate(MetricKind kind, const ScoredPredictions& sp, double threshold = 0.5);

}  // namespace imbench
