#include "imbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace imbench {

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void check_scored(const ScoredPredictions& sp) {
  if (sp.scores.size() != sp.truth.size()) {
    throw std::invalid_argument("scores and truth have different lengths");
  }
  if (sp.scores.empty()) throw std::invalid_argument("no predictions");
}

std::pair<std::size_t, std::size_t> class_counts(const ScoredPredictions& sp) {
  const auto p = static_cast<std::size_t>(std::count(sp.truth.begin(), sp.truth.end(), Label::positive));
  return {p, sp.truth.size() - p};
}

void require_both_classes(std::size_t p, std::size_t n) {
  if (p == 0 || n == 0) throw std::invalid_argument("auc needs at least one positive and one negative");
}

}  // namespace

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::acc: return "acc";
    case MetricKind::auc: return "auc";
    case MetricKind::f1: return "f1";
    case MetricKind::gmean: return "gmean";
    case MetricKind::mcc: return "mcc";
    case MetricKind::bac: return "bac";
    case MetricKind::precision: return "precision";
    case MetricKind::recall: return "recall";
    case MetricKind::specificity: return "specificity";
  }
  return "?";
}

MetricKind parse_metric(const std::string& name) {
  for (auto kind : {MetricKind::acc, MetricKind::auc, MetricKind::f1, MetricKind::gmean,
                    MetricKind::mcc, MetricKind::bac, MetricKind::precision, MetricKind::recall,
                    MetricKind::specificity}) {
    if (to_string(kind) == name) return kind;
  }
  if (name == "ba") return MetricKind::bac;
  throw std::invalid_argument("unknown metric '" + name + "'");
}

double metric_lower_bound(MetricKind kind) { return kind == MetricKind::mcc ? -1.0 : 0.0; }

ConfusionMatrix confusion(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) {
    throw std::invalid_argument("confusion: truth and prediction lengths differ");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = is_positive(truth[i]);
    const bool p = is_positive(predicted[i]);
    if (t && p) ++cm.tp;
    else if (!t && p) ++cm.fp;
    else if (!t) ++cm.tn;
    else ++cm.fn;
  }
  return cm;
}

double precision(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fp); }
double recall(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fn); }
double specificity(const ConfusionMatrix& cm) { return ratio(cm.tn, cm.tn + cm.fp); }

double score_metric(MetricKind kind, const ConfusionMatrix& cm) {
  switch (kind) {
    case MetricKind::acc:
      return ratio(cm.tp + cm.tn, cm.total());
    case MetricKind::precision:
      return precision(cm);
    case MetricKind::recall:
      return recall(cm);
    case MetricKind::specificity:
      return specificity(cm);
    case MetricKind::f1:
      return ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
    case MetricKind::bac:
      return (recall(cm) + specificity(cm)) / 2.0;
    case MetricKind::gmean:
      return std::sqrt(recall(cm) * specificity(cm));
    case MetricKind::mcc: {
      const double tp = static_cast<double>(cm.tp);
      const double fp = static_cast<double>(cm.fp);
      const double tn = static_cast<double>(cm.tn);
      const double fn = static_cast<double>(cm.fn);
      const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
      if (den == 0.0) return 0.0;
      return (tp * tn - fp * fn) / std::sqrt(den);
    }
    case MetricKind::auc:
      break;
  }
  throw std::invalid_argument("score_metric: auc needs scored predictions");
}

double auc(const ScoredPredictions& sp, TiePolicy ties) {
  check_scored(sp);
  const auto [p, n] = class_counts(sp);
  require_both_classes(p, n);

  std::vector<std::size_t> order(sp.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return sp.scores[a] < sp.scores[b]; });

  const double tie_credit = ties == TiePolicy::half ? 0.5 : 0.0;
  double wins = 0.0;
  std::uint64_t negatives_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t group_pos = 0;
    std::uint64_t group_neg = 0;
    while (j < order.size() && sp.scores[order[j]] == sp.scores[order[i]]) {
      is_positive(sp.truth[order[j]]) ? ++group_pos : ++group_neg;
      ++j;
    }
    wins += static_cast<double>(group_pos * negatives_below) +
            tie_credit * static_cast<double>(group_pos * group_neg);
    negatives_below += group_neg;
    i = j;
  }
  return wins / (static_cast<double>(p) * static_cast<double>(n));
}

double auc_pairwise(const ScoredPredictions& sp, TiePolicy ties) {
  check_scored(sp);
  const auto [p, n] = class_counts(sp);
  require_both_classes(p, n);
  const double tie_credit = ties == TiePolicy::half ? 0.5 : 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < sp.scores.size(); ++i) {
    if (!is_positive(sp.truth[i])) continue;
    for (std::size_t j = 0; j < sp.scores.size(); ++j) {
      if (is_positive(sp.truth[j])) continue;
      const double diff = sp.scores[i] - sp.scores[j];
      if (diff > 0.0) total += 1.0;
      else if (diff == 0.0) total += tie_credit;
    }
  }
  return total / (static_cast<double>(p) * static_cast<double>(n));
}

double auc_rank_sum(const ScoredPredictions& sp) {
  check_scored(sp);
  const auto [p, n] = class_counts(sp);
  require_both_classes(p, n);

  std::vector<std::size_t> order(sp.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return sp.scores[a] < sp.scores[b]; });

  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && sp.scores[order[j]] == sp.scores[order[i]]) ++j;
    const double average_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (is_positive(sp.truth[order[k]])) positive_rank_sum += average_rank;
    }
    i = j;
  }
  const double pd = static_cast<double>(p);
  return (positive_rank_sum - pd * (pd + 1.0) / 2.0) / (pd * static_cast<double>(n));
}

std::vector<Label> threshold_labels(std::span<const double> scores, double threshold) {
  std::vector<Label> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(s >= threshold ? Label::positive : Label::negative);
  return out;
}

double evaluate(MetricKind kind, const ScoredPredictions& sp, double threshold) {
  check_scored(sp);
  if (kind == MetricKind::auc) return auc(sp);
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("evaluate: threshold must lie in [0, 1]");
  }
  return score_metric(kind, confusion(sp.truth, threshold_labels(sp.scores, threshold)));
}

}  // namespace imbench
