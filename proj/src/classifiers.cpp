#include "imbench/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "imbench/random.hpp"

namespace imbench {

namespace {

double sigmoid(double m) { return 1.0 / (1.0 + std::exp(-m)); }

bool is_whole(double v) { return std::floor(v) == v; }

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

double weighted_log_loss(std::span<const double> margin, std::span<const Label> y,
                         std::span<const double> w) {
  double loss = 0.0;
  for (std::size_t i = 0; i < margin.size(); ++i) {
    // log(1 + exp(-s m)) with s = +-1, written to avoid overflow.
    const double m = is_positive(y[i]) ? margin[i] : -margin[i];
    loss += w[i] * (m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m)));
  }
  return loss;
}

ModelPtr fit_cart(const ClassifierSpec& spec, const BinaryDataset& train, std::span<const double> w) {
  CartOptions options;
  options.max_depth = static_cast<int>(spec.param("max_depth", 0));
  std::vector<std::size_t> rows(train.size());
  std::iota(rows.begin(), rows.end(), 0);
  return std::make_shared<CartModel>(
      grow_classification_tree(train.features, train.labels, w, std::move(rows), options),
      train.dim());
}

ModelPtr fit_forest(const ClassifierSpec& spec, const BinaryDataset& train,
                    std::span<const double> w, std::uint64_t seed) {
  const std::size_t d = train.dim();
  const auto default_mtry = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
  CartOptions options;
  options.mtry = static_cast<std::size_t>(spec.param("mtry", static_cast<double>(default_mtry)));
  const auto ntree = static_cast<std::size_t>(spec.param("ntree", 500));
  const bool bootstrap = spec.param("bootstrap", 1) != 0.0;

  std::vector<DecisionTree> trees;
  trees.reserve(ntree);
  const std::size_t n = train.size();
  for (std::size_t t = 0; t < ntree; ++t) {
    Rng rng(derive_seed(seed, t));
    std::vector<std::size_t> rows(n);
    if (bootstrap) {
      for (auto& r : rows) r = rng.below(n);
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    trees.push_back(grow_classification_tree(train.features, train.labels, w, std::move(rows),
                                             options, &rng));
  }
  return std::make_shared<ForestModel>(std::move(trees), d);
}

ModelPtr fit_boosting(const ClassifierSpec& spec, const BinaryDataset& train,
                      std::span<const double> w) {
  GradientTreeOptions options;
  options.max_depth = static_cast<int>(spec.param("max_depth", 6));
  options.eta = spec.param("eta", 0.3);
  options.lambda = spec.param("lambda", 1.0);
  options.min_child_hessian = spec.param("min_child_weight", 1.0);
  const auto rounds = static_cast<std::size_t>(spec.param("nrounds", 100));

  const std::size_t n = train.size();
  // Base margin 0, i.e. an initial score of 0.5 for every row.
  std::vector<double> margin(n, 0.0);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  std::vector<DecisionTree> trees;
  trees.reserve(rounds);
  std::vector<double> trace{weighted_log_loss(margin, train.labels, w)};
  for (std::size_t round = 0; round < rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      grad[i] = w[i] * (p - (is_positive(train.labels[i]) ? 1.0 : 0.0));
      hess[i] = w[i] * std::max(p * (1.0 - p), 1e-16);
    }
    trees.push_back(grow_gradient_tree(train.features, grad, hess, options));
    for (std::size_t i = 0; i < n; ++i) margin[i] += trees.back().predict(train.features.row(i));
    trace.push_back(weighted_log_loss(margin, train.labels, w));
  }
  return std::make_shared<GradientBoostingModel>(std::move(trees), 0.0, train.dim(), std::move(trace));
}

}  // namespace

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::cart: return "cart";
    case ClassifierKind::random_forest: return "random_forest";
    case ClassifierKind::gradient_boosting: return "gradient_boosting";
    case ClassifierKind::one_nn: return "one_nn";
  }
  return "?";
}

std::string short_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::cart: return "cart";
    case ClassifierKind::random_forest: return "rf";
    case ClassifierKind::gradient_boosting: return "xgb";
    case ClassifierKind::one_nn: return "1nn";
  }
  return "?";
}

ClassifierKind parse_classifier(const std::string& name) {
  for (auto kind : {ClassifierKind::cart, ClassifierKind::random_forest,
                    ClassifierKind::gradient_boosting, ClassifierKind::one_nn}) {
    if (name == to_string(kind) || name == short_name(kind)) return kind;
  }
  throw std::invalid_argument("unknown classifier '" + name + "'");
}

double ClassifierSpec::param(const std::string& name, double fallback) const {
  const auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

void validate(const ClassifierSpec& spec, std::size_t dim) {
  for (const auto& [name, value] : spec.params) {
    require(std::isfinite(value), "parameter '" + name + "' is not finite");
  }
  switch (spec.kind) {
    case ClassifierKind::cart: {
      const double depth = spec.param("max_depth", 0);
      require(depth >= 0 && is_whole(depth), "cart: max_depth must be a nonnegative integer");
      break;
    }
    case ClassifierKind::random_forest: {
      const double mtry = spec.param("mtry", 1);
      const double ntree = spec.param("ntree", 1);
      require(is_whole(mtry) && mtry >= 1 && mtry <= static_cast<double>(dim),
              "random_forest: mtry must be an integer in [1, " + std::to_string(dim) + "]");
      require(is_whole(ntree) && ntree >= 1, "random_forest: ntree must be a positive integer");
      break;
    }
    case ClassifierKind::gradient_boosting: {
      const double depth = spec.param("max_depth", 6);
      const double eta = spec.param("eta", 0.3);
      const double rounds = spec.param("nrounds", 100);
      require(is_whole(depth) && depth >= 1, "gradient_boosting: max_depth must be >= 1");
      require(eta > 0 && eta <= 1, "gradient_boosting: eta must lie in (0, 1]");
      require(is_whole(rounds) && rounds >= 1, "gradient_boosting: nrounds must be >= 1");
      require(spec.param("lambda", 1.0) >= 0, "gradient_boosting: lambda must be >= 0");
      break;
    }
    case ClassifierKind::one_nn:
      break;
  }
}

std::vector<double> predict_scores(const Model& model, const FeatureMatrix& x) {
  if (x.cols() != model.dim()) {
    throw std::invalid_argument("predict_scores: model expects " + std::to_string(model.dim()) +
                                " features, got " + std::to_string(x.cols()));
  }
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = model.score(x.row(i));
  return out;
}

double ForestModel::score(std::span<const double> row) const {
  std::size_t votes = 0;
  for (const auto& t : trees_) votes += t.predict(row) >= 0.5 ? 1 : 0;
  return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

double GradientBoostingModel::margin(std::span<const double> row) const {
  double m = base_margin_;
  for (const auto& t : trees_) m += t.predict(row);
  return m;
}

double GradientBoostingModel::score(std::span<const double> row) const { return sigmoid(margin(row)); }

double NearestNeighborModel::score(std::span<const double> row) const {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < x_.rows(); ++i) {
    const auto r = x_.row(i);
    double dist = 0.0;
    for (std::size_t c = 0; c < r.size() && dist < best; ++c) {
      const double diff = r[c] - row[c];
      dist += diff * diff;
    }
    if (dist < best) {
      best = dist;
      best_index = i;
    }
  }
  return is_positive(y_[best_index]) ? 1.0 : 0.0;
}

void check_weights(std::span<const double> weights, std::size_t rows) {
  require(weights.size() == rows, "weight vector length " + std::to_string(weights.size()) +
                                      " does not match " + std::to_string(rows) + " rows");
  double sum = 0.0;
  for (double w : weights) {
    require(std::isfinite(w) && w >= 0.0, "weights must be finite and nonnegative");
    sum += w;
  }
  require(sum > 0.0, "weights must have a positive sum");
}

ModelPtr fit(const ClassifierSpec& spec, const BinaryDataset& train, std::span<const double> weights,
             std::uint64_t seed) {
  require(train.size() > 0, "fit: empty training set");
  require(train.labels.size() == train.features.rows(), "fit: label count does not match rows");
  check_weights(weights, train.size());
  validate(spec, train.dim());

  const std::size_t pos = train.positives();
  if (pos == 0 || pos == train.size()) {
    return std::make_shared<ConstantModel>(pos == 0 ? 0.0 : 1.0, train.dim());
  }
  switch (spec.kind) {
    case ClassifierKind::cart:
      return fit_cart(spec, train, weights);
    case ClassifierKind::random_forest:
      return fit_forest(spec, train, weights, seed);
    case ClassifierKind::gradient_boosting:
      return fit_boosting(spec, train, weights);
    case ClassifierKind::one_nn:
      return std::make_shared<NearestNeighborModel>(train.features, train.labels);
  }
  throw std::logic_error("fit: unhandled classifier kind");
}

ModelPtr fit(const ClassifierSpec& spec, const BinaryDataset& train, std::uint64_t seed) {
  const std::vector<double> ones(train.size(), 1.0);
  return fit(spec, train, ones, seed);
}

}  // namespace imbench
