#include "imbench/tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace imbench {

namespace {

struct Entry {
  double value;
  std::size_t row;
};

struct Candidate {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double score = std::numeric_limits<double>::infinity();  // lower is better
};

double midpoint(double a, double b) {
  const double mid = a * 0.5 + b * 0.5;
  return mid < b ? mid : a;
}

void sort_feature(const FeatureMatrix& x, std::span<const std::size_t> rows, std::size_t feature,
                  std::vector<Entry>& buf) {
  buf.clear();
  for (std::size_t r : rows) buf.push_back({x(r, feature), r});
  std::sort(buf.begin(), buf.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });
}

class ClassificationGrower {
 public:
  ClassificationGrower(const FeatureMatrix& x, std::span<const Label> y, std::span<const double> w,
                       const CartOptions& options, Rng* rng)
      : x_(x), y_(y), w_(w), options_(options), rng_(rng) {
    features_.resize(x.cols());
    std::iota(features_.begin(), features_.end(), 0);
  }

  std::vector<TreeNode> grow(std::vector<std::size_t> rows) {
    rows_ = std::move(rows);
    build(0, rows_.size(), 0);
    return std::move(nodes_);
  }

 private:
  std::int32_t build(std::size_t begin, std::size_t end, int depth) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();

    double pos = 0.0;
    double neg = 0.0;
    std::size_t pos_count = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t r = rows_[i];
      if (is_positive(y_[r])) {
        pos += w_[r];
        ++pos_count;
      } else {
        neg += w_[r];
      }
    }
    const double total = pos + neg;
    nodes_[id].value = total > 0.0 ? pos / total
                                   : static_cast<double>(pos_count) / static_cast<double>(end - begin);

    const bool pure = total <= 0.0 || pos == 0.0 || neg == 0.0;
    const bool depth_capped = options_.max_depth > 0 && depth >= options_.max_depth;
    if (pure || depth_capped || end - begin < 2) return id;

    const Candidate best = find_split(begin, end, total);
    if (best.feature < 0) return id;

    const auto f = static_cast<std::size_t>(best.feature);
    const auto middle = std::partition(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                                       rows_.begin() + static_cast<std::ptrdiff_t>(end),
                                       [&](std::size_t r) { return x_(r, f) <= best.threshold; });
    const auto split = static_cast<std::size_t>(middle - rows_.begin());

    nodes_[id].feature = best.feature;
    nodes_[id].threshold = best.threshold;
    const std::int32_t left = build(begin, split, depth + 1);
    const std::int32_t right = build(split, end, depth + 1);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  Candidate find_split(std::size_t begin, std::size_t end, double total) {
    const std::span<const std::size_t> rows(rows_.data() + begin, end - begin);
    const double tolerance = 1e-12 * total;
    Candidate best;

    const std::size_t d = features_.size();
    const std::size_t mtry = options_.mtry == 0 ? d : std::min(options_.mtry, d);
    std::vector<std::size_t> order(features_);
    if (mtry < d) {
      for (std::size_t i = 0; i < mtry; ++i) std::swap(order[i], order[i + rng_->below(d - i)]);
      std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(mtry));
      std::sort(order.begin() + static_cast<std::ptrdiff_t>(mtry), order.end());
    }

    auto scan = [&](std::size_t from, std::size_t to) {
      for (std::size_t k = from; k < to; ++k) scan_feature(order[k], rows, tolerance, best);
    };
    scan(0, mtry);
    if (best.feature < 0 && mtry < d) scan(mtry, d);
    return best;
  }

  void scan_feature(std::size_t feature, std::span<const std::size_t> rows, double tolerance,
                    Candidate& best) {
    sort_feature(x_, rows, feature, buf_);
    double pos_total = 0.0;
    double neg_total = 0.0;
    for (const auto& e : buf_) (is_positive(y_[e.row]) ? pos_total : neg_total) += w_[e.row];

    double pos_left = 0.0;
    double neg_left = 0.0;
    for (std::size_t i = 0; i + 1 < buf_.size(); ++i) {
      (is_positive(y_[buf_[i].row]) ? pos_left : neg_left) += w_[buf_[i].row];
      if (buf_[i].value == buf_[i + 1].value) continue;
      const double pos_right = pos_total - pos_left;
      const double neg_right = neg_total - neg_left;
      const double score = gini(pos_left, neg_left) + gini(pos_right, neg_right);
      if (score < best.score - tolerance) {
        best.feature = static_cast<std::int32_t>(feature);
        best.threshold = midpoint(buf_[i].value, buf_[i + 1].value);
        best.score = score;
      }
    }
  }

  // Weighted Gini impurity W * (1 - p^2 - n^2 / W^2).
  static double gini(double pos, double neg) {
    const double w = pos + neg;
    return w > 0.0 ? w - (pos * pos + neg * neg) / w : 0.0;
  }

  const FeatureMatrix& x_;
  std::span<const Label> y_;
  std::span<const double> w_;
  CartOptions options_;
  Rng* rng_;
  std::vector<std::size_t> features_;
  std::vector<std::size_t> rows_;
  std::vector<TreeNode> nodes_;
  std::vector<Entry> buf_;
};

class GradientGrower {
 public:
  GradientGrower(const FeatureMatrix& x, std::span<const double> g, std::span<const double> h,
                 const GradientTreeOptions& options)
      : x_(x), g_(g), h_(h), options_(options) {}

  std::vector<TreeNode> grow() {
    rows_.resize(x_.rows());
    std::iota(rows_.begin(), rows_.end(), 0);
    build(0, rows_.size(), 0);
    return std::move(nodes_);
  }

 private:
  std::int32_t build(std::size_t begin, std::size_t end, int depth) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    double g = 0.0;
    double h = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      g += g_[rows_[i]];
      h += h_[rows_[i]];
    }
    nodes_[id].value = -options_.eta * g / (h + options_.lambda);
    if (depth >= options_.max_depth || end - begin < 2) return id;

    const double parent = g * g / (h + options_.lambda);
    const std::span<const std::size_t> rows(rows_.data() + begin, end - begin);
    Candidate best;
    best.score = -1e-12;  // negated gain; require strictly positive gain
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      sort_feature(x_, rows, f, buf_);
      double gl = 0.0;
      double hl = 0.0;
      for (std::size_t i = 0; i + 1 < buf_.size(); ++i) {
        gl += g_[buf_[i].row];
        hl += h_[buf_[i].row];
        if (buf_[i].value == buf_[i + 1].value) continue;
        const double hr = h - hl;
        if (hl < options_.min_child_hessian || hr < options_.min_child_hessian) continue;
        const double gr = g - gl;
        const double gain = gl * gl / (hl + options_.lambda) + gr * gr / (hr + options_.lambda) - parent;
        if (-gain < best.score - 1e-12 * std::abs(parent)) {
          best.feature = static_cast<std::int32_t>(f);
          best.threshold = midpoint(buf_[i].value, buf_[i + 1].value);
          best.score = -gain;
        }
      }
    }
    if (best.feature < 0) return id;

    const auto f = static_cast<std::size_t>(best.feature);
    const auto middle = std::partition(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                                       rows_.begin() + static_cast<std::ptrdiff_t>(end),
                                       [&](std::size_t r) { return x_(r, f) <= best.threshold; });
    const auto split = static_cast<std::size_t>(middle - rows_.begin());
    nodes_[id].feature = best.feature;
    nodes_[id].threshold = best.threshold;
    const std::int32_t left = build(begin, split, depth + 1);
    const std::int32_t right = build(split, end, depth + 1);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  const FeatureMatrix& x_;
  std::span<const double> g_;
  std::span<const double> h_;
  GradientTreeOptions options_;
  std::vector<std::size_t> rows_;
  std::vector<TreeNode> nodes_;
  std::vector<Entry> buf_;
};

}  // namespace

double DecisionTree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes_[i].value;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  // Children always follow their parent in the node array.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

DecisionTree grow_classification_tree(const FeatureMatrix& x, std::span<const Label> y,
                                      std::span<const double> weights,
                                      std::vector<std::size_t> rows, const CartOptions& options,
                                      Rng* rng) {
  if (rows.empty()) throw std::invalid_argument("grow_classification_tree: no rows");
  if (y.size() != x.rows() || weights.size() != x.rows()) {
    throw std::invalid_argument("grow_classification_tree: label/weight length mismatch");
  }
  if (options.mtry != 0 && options.mtry < x.cols() && rng == nullptr) {
    throw std::invalid_argument("grow_classification_tree: feature sampling needs an Rng");
  }
  ClassificationGrower grower(x, y, weights, options, rng);
  return DecisionTree(grower.grow(std::move(rows)));
}

DecisionTree grow_gradient_tree(const FeatureMatrix& x, std::span<const double> gradients,
                                std::span<const double> hessians,
                                const GradientTreeOptions& options) {
  if (x.rows() == 0) throw std::invalid_argument("grow_gradient_tree: no rows");
  if (gradients.size() != x.rows() || hessians.size() != x.rows()) {
    throw std::invalid_argument("grow_gradient_tree: gradient/hessian length mismatch");
  }
  GradientGrower grower(x, gradients, hessians, options);
  return DecisionTree(grower.grow());
}

}  // namespace imbench
