#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "imbench/data.hpp"
#include "imbench/tree.hpp"

namespace imbench {

using ParamMap = std::map<std::string, double>;

enum class ClassifierKind { cart, random_forest, gradient_boosting, one_nn };

std::string to_string(ClassifierKind kind);
/// Accepts the canonical names plus the short forms rf, xgb, 1nn.
ClassifierKind parse_classifier(const std::string& name);
/// Short display name used in solution identifiers (cart, rf, xgb, 1nn).
std::string short_name(ClassifierKind kind);

/// Recognised parameters:
///   cart:              max_depth (0 = unlimited, default)
///   random_forest:     mtry (default floor(sqrt(d))), ntree (default 500),
///                      bootstrap (1/0, default 1)
///   gradient_boosting: max_depth (6), eta (0.3), nrounds (100), lambda (1),
///                      min_child_weight (1)
///   one_nn:            none
struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::cart;
  ParamMap params;

  double param(const std::string& name, double fallback) const;
};

/// Throws std::invalid_argument when a parameter is outside its valid range
/// for data of dimension `dim`.
void validate(const ClassifierSpec& spec, std::size_t dim);

/// A trained scorer. Scores lie in [0, 1]; a row is labelled positive when
/// its score is >= 0.5. Models are immutable once built.
class Model {
 public:
  virtual ~Model() = default;
  virtual double score(std::span<const double> row) const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::string kind() const = 0;
};

using ModelPtr = std::shared_ptr<const Model>;

std::vector<double> predict_scores(const Model& model, const FeatureMatrix& x);

class ConstantModel final : public Model {
 public:
  ConstantModel(double value, std::size_t dim) : value_(value), dim_(dim) {}
  double score(std::span<const double>) const override { return value_; }
  std::size_t dim() const override { return dim_; }
  std::string kind() const override { return "constant"; }
  double value() const { return value_; }

 private:
  double value_;
  std::size_t dim_;
};

class CartModel final : public Model {
 public:
  CartModel(DecisionTree tree, std::size_t dim) : tree_(std::move(tree)), dim_(dim) {}
  double score(std::span<const double> row) const override { return tree_.predict(row); }
  std::size_t dim() const override { return dim_; }
  std::string kind() const override { return "cart"; }
  const DecisionTree& tree() const { return tree_; }

 private:
  DecisionTree tree_;
  std::size_t dim_;
};

/// Score is the fraction of trees whose leaf votes positive (leaf value >= 0.5).
class ForestModel final : public Model {
 public:
  ForestModel(std::vector<DecisionTree> trees, std::size_t dim)
      : trees_(std::move(trees)), dim_(dim) {}
  double score(std::span<const double> row) const override;
  std::size_t dim() const override { return dim_; }
  std::string kind() const override { return "random_forest"; }
  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
  std::size_t dim_;
};

/// Logistic-loss boosting; score is sigmoid(base_margin + sum of tree outputs).
class GradientBoostingModel final : public Model {
 public:
  GradientBoostingModel(std::vector<DecisionTree> trees, double base_margin, std::size_t dim,
                        std::vector<double> loss_trace = {})
      : trees_(std::move(trees)), base_margin_(base_margin), dim_(dim),
        loss_trace_(std::move(loss_trace)) {}
  double score(std::span<const double> row) const override;
  double margin(std::span<const double> row) const;
  std::size_t dim() const override { return dim_; }
  std::string kind() const override { return "gradient_boosting"; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  double base_margin() const { return base_margin_; }
  /// Weighted training log-loss before the first round and after each round.
  const std::vector<double>& loss_trace() const { return loss_trace_; }

 private:
  std::vector<DecisionTree> trees_;
  double base_margin_;
  std::size_t dim_;
  std::vector<double> loss_trace_;
};

/// Euclidean 1-nearest-neighbour; ties go to the lowest training index.
class NearestNeighborModel final : public Model {
 public:
  NearestNeighborModel(FeatureMatrix x, std::vector<Label> y) : x_(std::move(x)), y_(std::move(y)) {}
  double score(std::span<const double> row) const override;
  std::size_t dim() const override { return x_.cols(); }
  std::string kind() const override { return "one_nn"; }
  const FeatureMatrix& features() const { return x_; }
  const std::vector<Label>& labels() const { return y_; }

 private:
  FeatureMatrix x_;
  std::vector<Label> y_;
};

/// Trains a base classifier. A training set with a single class yields a
/// ConstantModel scoring that class. 1-NN ignores weights.
ModelPtr fit(const ClassifierSpec& spec, const BinaryDataset& train, std::span<const double> weights,
             std::uint64_t seed);

ModelPtr fit(const ClassifierSpec& spec, const BinaryDataset& train, std::uint64_t seed);

/// Checks the weight vector: one nonnegative finite entry per row, positive sum.
void check_weights(std::span<const double> weights, std::size_t rows);

}  // namespace imbench
