#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "imbench/data.hpp"
#include "imbench/matrix.hpp"
#include "imbench/random.hpp"

namespace imbench {

/// Flat binary tree node. Internal nodes route x[feature] <= threshold to
/// `left`; leaves have feature == -1 and carry `value`.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double predict(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t leaf_count() const;
  std::size_t depth() const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct CartOptions {
  /// 0 means unlimited.
  int max_depth = 0;
  /// Features examined per split; 0 means all. When fewer than all, a fresh
  /// random subset is drawn at every node, and the remaining features are
  /// examined only if none of the drawn ones admits a split.
  std::size_t mtry = 0;
};

/// Weighted-Gini CART. `rows` selects training rows and may repeat indices
/// (bootstrap). A node becomes a leaf when it is pure, holds a single
/// distinct feature vector, or reaches max_depth; every child holds at least
/// one row. Leaf value is the weighted positive fraction. Among splits of
/// equal impurity the lowest feature index, then lowest threshold, wins.
/// `rng` is only consulted when options.mtry restricts the feature set.
DecisionTree grow_classification_tree(const FeatureMatrix& x, std::span<const Label> y,
                                      std::span<const double> weights,
                                      std::vector<std::size_t> rows, const CartOptions& options,
                                      Rng* rng = nullptr);

struct GradientTreeOptions {
  int max_depth = 6;
  double lambda = 1.0;
  double min_child_hessian = 1.0;
  double eta = 0.3;
};

/// Second-order regression tree on per-row gradients and hessians, with
/// split gain G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda) and
/// leaf value -eta * G / (H + lambda).
DecisionTree grow_gradient_tree(const FeatureMatrix& x, std::span<const double> gradients,
                                std::span<const double> hessians, const GradientTreeOptions& options);

}  // namespace imbench
