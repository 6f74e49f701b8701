#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "imbench/classifiers.hpp"
#include "imbench/data.hpp"

namespace imbench {

enum class StrategyKind { baseline, class_weight, smote, underbagging, rusboost };

std::string to_string(StrategyKind kind);
/// Accepts canonical names plus "weight" for class_weight.
StrategyKind parse_strategy(const std::string& name);
/// Display name: baseline, weight, smote, underbagging, rusboost.
std::string short_name(StrategyKind kind);

/// Strategy parameters live under the keys smote.k, underbagging.n and
/// rusboost.nboost.
struct StrategySpec {
  StrategyKind kind = StrategyKind::baseline;
  ParamMap params;

  double param(const std::string& name, double fallback) const;
};

inline constexpr int kDefaultSmoteK = 5;

// --- class weight ----------------------------------------------------------

/// Negatives weigh 1, positives 1 / imbalance_rate.
std::vector<double> class_weight_vector(const BinaryDataset& ds);

// --- SMOTE -----------------------------------------------------------------

/// Indices of the k nearest other rows of `points` (Euclidean, ties by
/// index), for every row. k is clipped to rows - 1.
std::vector<std::vector<std::size_t>> nearest_neighbors(const FeatureMatrix& points, std::size_t k);

/// Random choices used by smote_synthesize, injectable for tests.
struct SmoteDraws {
  /// Returns an index in [0, n).
  std::function<std::size_t(std::size_t n)> pick;
  /// Returns the interpolation gap in [0, 1].
  std::function<double()> gap;
};

/// Generates `count` points. Sources cycle through the rows of `minority`
/// in order; each point is source + gap * (neighbour - source) for a random
/// neighbour among the source's k nearest. A single row is duplicated.
FeatureMatrix smote_synthesize(const FeatureMatrix& minority, std::size_t k, std::size_t count,
                               const SmoteDraws& draws);

/// Appends synthetic positives until both classes have the same size.
/// Original rows come first, unchanged.
BinaryDataset apply_smote(const BinaryDataset& ds, int k, std::uint64_t seed);

// --- ensembles -------------------------------------------------------------

/// Mean of member scores.
class AveragingEnsemble final : public Model {
 public:
  explicit AveragingEnsemble(std::vector<ModelPtr> members);
  double score(std::span<const double> row) const override;
  std::size_t dim() const override { return members_.front()->dim(); }
  std::string kind() const override { return "averaging_ensemble"; }
  const std::vector<ModelPtr>& members() const { return members_; }

 private:
  std::vector<ModelPtr> members_;
};

/// Row indices for each of the n bags: every positive plus as many distinct
/// negatives drawn without replacement. Each list is sorted.
std::vector<std::vector<std::size_t>> underbagging_bags(const BinaryDataset& ds, int n,
                                                        std::uint64_t seed);

ModelPtr fit_underbagging(const ClassifierSpec& spec, const BinaryDataset& ds, int n,
                          std::uint64_t seed);

struct BoostRound {
  double error = 0.0;
  double alpha = 0.0;
  /// Sum of the example weights after this round's update.
  double weight_sum = 0.0;
  /// Resampling attempts this round took, including discarded ones.
  int attempts = 1;
};

/// AdaBoost.M1 vote over CART members: score = sum(alpha_t * [tree_t >= 0.5])
/// / sum(alpha_t).
class RusBoostModel final : public Model {
 public:
  RusBoostModel(std::vector<DecisionTree> trees, std::vector<double> alphas, std::size_t dim,
                double fallback, std::vector<BoostRound> trace = {});
  double score(std::span<const double> row) const override;
  std::size_t dim() const override { return dim_; }
  std::string kind() const override { return "rusboost"; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  const std::vector<double>& alphas() const { return alphas_; }
  const std::vector<BoostRound>& trace() const { return trace_; }
  /// Score used when no round survived.
  double fallback() const { return fallback_; }

 private:
  std::vector<DecisionTree> trees_;
  std::vector<double> alphas_;
  std::size_t dim_;
  double fallback_;
  std::vector<BoostRound> trace_;
};

inline constexpr int kMaxFailedBoostRounds = 10;

/// Each round keeps all positives and draws as many negatives without
/// replacement, with probability following the current example weights;
/// a CART is fit on that sample with the carried weights. Error, alpha and
/// the weight update use the whole training set. A perfect round
/// (error 0, clamped to 1e-10) is kept and ends boosting; a round with
/// error >= 0.5 is discarded and redrawn, and boosting ends after
/// kMaxFailedBoostRounds consecutive discards.
std::shared_ptr<const RusBoostModel> fit_rusboost(const BinaryDataset& ds, int nboost,
                                                  std::uint64_t seed, const CartOptions& cart = {});

/// Trains a (strategy, base classifier) pair. rusboost ignores `clf`.
ModelPtr fit_solution(const StrategySpec& strategy, const ClassifierSpec& clf,
                      const BinaryDataset& ds, std::uint64_t seed);

}  // namespace imbench
