#include "imbench/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "imbench/random.hpp"

namespace imbench {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

int positive_int_param(double value, const char* name) {
  if (!(value >= 1.0) || std::floor(value) != value) {
    throw std::invalid_argument(std::string(name) + " must be a positive integer");
  }
  return static_cast<int>(value);
}

}  // namespace

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::baseline: return "baseline";
    case StrategyKind::class_weight: return "class_weight";
    case StrategyKind::smote: return "smote";
    case StrategyKind::underbagging: return "underbagging";
    case StrategyKind::rusboost: return "rusboost";
  }
  return "?";
}

std::string short_name(StrategyKind kind) {
  return kind == StrategyKind::class_weight ? "weight" : to_string(kind);
}

StrategyKind parse_strategy(const std::string& name) {
  for (auto kind : {StrategyKind::baseline, StrategyKind::class_weight, StrategyKind::smote,
                    StrategyKind::underbagging, StrategyKind::rusboost}) {
    if (name == to_string(kind) || name == short_name(kind)) return kind;
  }
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

double StrategySpec::param(const std::string& name, double fallback) const {
  const auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

std::vector<double> class_weight_vector(const BinaryDataset& ds) {
  const double rate = ds.imbalance_rate();
  if (!(rate > 0.0)) throw std::invalid_argument("class_weight_vector: no positive examples");
  std::vector<double> w(ds.size(), 1.0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (is_positive(ds.labels[i])) w[i] = 1.0 / rate;
  }
  return w;
}

std::vector<std::vector<std::size_t>> nearest_neighbors(const FeatureMatrix& points, std::size_t k) {
  const std::size_t n = points.rows();
  k = std::min(k, n == 0 ? 0 : n - 1);
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < n; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dist.emplace_back(squared_distance(points.row(i), points.row(j)), j);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    for (std::size_t m = 0; m < k; ++m) out[i].push_back(dist[m].second);
  }
  return out;
}

FeatureMatrix smote_synthesize(const FeatureMatrix& minority, std::size_t k, std::size_t count,
                               const SmoteDraws& draws) {
  if (minority.rows() == 0) throw std::invalid_argument("smote: no minority examples");
  if (k == 0) throw std::invalid_argument("smote: k must be at least 1");
  const auto neighbours = nearest_neighbors(minority, k);

  FeatureMatrix out(count, minority.cols());
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t source = s % minority.rows();
    const auto from = minority.row(source);
    auto dst = out.row(s);
    const auto& nn = neighbours[source];
    if (nn.empty()) {
      std::copy(from.begin(), from.end(), dst.begin());
      continue;
    }
    const auto to = minority.row(nn[draws.pick(nn.size())]);
    const double gap = draws.gap();
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = from[c] + gap * (to[c] - from[c]);
  }
  return out;
}

BinaryDataset apply_smote(const BinaryDataset& ds, int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("apply_smote: k must be at least 1");
  const auto pos = ds.indices_of(Label::positive);
  if (pos.empty()) throw std::invalid_argument("apply_smote: no positive examples");
  const std::size_t neg = ds.size() - pos.size();
  if (neg <= pos.size()) return ds;

  Rng rng(seed);
  const SmoteDraws draws{[&rng](std::size_t n) { return rng.below(n); },
                         [&rng] { return rng.uniform(); }};
  const FeatureMatrix synthetic =
      smote_synthesize(ds.features.select_rows(pos), static_cast<std::size_t>(k), neg - pos.size(), draws);

  BinaryDataset out = ds;
  for (std::size_t r = 0; r < synthetic.rows(); ++r) {
    out.features.append_row(synthetic.row(r));
    out.labels.push_back(Label::positive);
  }
  return out;
}

AveragingEnsemble::AveragingEnsemble(std::vector<ModelPtr> members) : members_(std::move(members)) {
  if (members_.empty()) throw std::invalid_argument("AveragingEnsemble: no members");
}

double AveragingEnsemble::score(std::span<const double> row) const {
  double sum = 0.0;
  for (const auto& m : members_) sum += m->score(row);
  return sum / static_cast<double>(members_.size());
}

std::vector<std::vector<std::size_t>> underbagging_bags(const BinaryDataset& ds, int n,
                                                        std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("underbagging: number of bags must be at least 1");
  const auto pos = ds.indices_of(Label::positive);
  const auto neg = ds.indices_of(Label::negative);
  if (pos.empty()) throw std::invalid_argument("underbagging: no positive examples");
  if (neg.size() < pos.size()) {
    throw std::invalid_argument("underbagging: fewer negatives than positives");
  }

  std::vector<std::vector<std::size_t>> bags;
  bags.reserve(static_cast<std::size_t>(n));
  std::vector<std::size_t> pool;
  for (int b = 0; b < n; ++b) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
    pool = neg;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    }
    std::vector<std::size_t> bag = pos;
    bag.insert(bag.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(pos.size()));
    std::sort(bag.begin(), bag.end());
    bags.push_back(std::move(bag));
  }
  return bags;
}

ModelPtr fit_underbagging(const ClassifierSpec& spec, const BinaryDataset& ds, int n,
                          std::uint64_t seed) {
  const auto bags = underbagging_bags(ds, n, seed);
  std::vector<ModelPtr> members;
  members.reserve(bags.size());
  for (std::size_t b = 0; b < bags.size(); ++b) {
    members.push_back(fit(spec, ds.subset(bags[b]), derive_seed(seed, b, 0x6d656d62ULL)));
  }
  return std::make_shared<AveragingEnsemble>(std::move(members));
}

RusBoostModel::RusBoostModel(std::vector<DecisionTree> trees, std::vector<double> alphas,
                             std::size_t dim, double fallback, std::vector<BoostRound> trace)
    : trees_(std::move(trees)), alphas_(std::move(alphas)), dim_(dim), fallback_(fallback),
      trace_(std::move(trace)) {
  if (trees_.size() != alphas_.size()) {
    throw std::invalid_argument("RusBoostModel: tree and alpha counts differ");
  }
}

double RusBoostModel::score(std::span<const double> row) const {
  double vote = 0.0;
  double total = 0.0;
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    total += alphas_[t];
    if (trees_[t].predict(row) >= 0.5) vote += alphas_[t];
  }
  return total > 0.0 ? vote / total : fallback_;
}

std::shared_ptr<const RusBoostModel> fit_rusboost(const BinaryDataset& ds, int nboost,
                                                  std::uint64_t seed, const CartOptions& cart) {
  if (nboost < 1) throw std::invalid_argument("rusboost: nboost must be at least 1");
  const auto pos = ds.indices_of(Label::positive);
  const auto neg = ds.indices_of(Label::negative);
  if (pos.empty() || neg.empty()) throw std::invalid_argument("rusboost: both classes are required");

  const std::size_t n = ds.size();
  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  std::vector<DecisionTree> trees;
  std::vector<double> alphas;
  std::vector<BoostRound> trace;
  std::vector<std::pair<double, std::size_t>> keys(neg.size());
  std::vector<Label> predicted(n);
  const std::size_t draw = std::min(pos.size(), neg.size());

  std::uint64_t attempt = 0;
  int failures = 0;
  while (static_cast<int>(trees.size()) < nboost) {
    Rng rng(derive_seed(seed, attempt++));
    // Weighted sampling without replacement: keep the largest log(u)/w keys.
    for (std::size_t i = 0; i < neg.size(); ++i) {
      const double w = weights[neg[i]];
      const double u = 1.0 - rng.uniform();  // (0, 1]
      keys[i] = {w > 0.0 ? std::log(u) / w : -std::numeric_limits<double>::infinity(), neg[i]};
    }
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(draw), keys.end(),
                      [](const auto& a, const auto& b) {
                        return a.first > b.first || (a.first == b.first && a.second < b.second);
                      });
    std::vector<std::size_t> sample = pos;
    for (std::size_t i = 0; i < draw; ++i) sample.push_back(keys[i].second);
    std::sort(sample.begin(), sample.end());

    DecisionTree tree =
        grow_classification_tree(ds.features, ds.labels, weights, std::move(sample), cart);
    double error = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      predicted[i] = tree.predict(ds.features.row(i)) >= 0.5 ? Label::positive : Label::negative;
      if (predicted[i] != ds.labels[i]) error += weights[i];
    }

    if (error >= 0.5) {
      if (++failures >= kMaxFailedBoostRounds) break;
      continue;
    }
    const bool perfect = error <= 0.0;
    error = std::max(error, 1e-10);
    const double alpha = std::log((1.0 - error) / error);
    const double beta = error / (1.0 - error);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (predicted[i] == ds.labels[i]) weights[i] *= beta;
      sum += weights[i];
    }
    double normalized = 0.0;
    for (auto& w : weights) {
      w /= sum;
      normalized += w;
    }
    trees.push_back(std::move(tree));
    alphas.push_back(alpha);
    trace.push_back({error, alpha, normalized, failures + 1});
    failures = 0;
    if (perfect) break;
  }
  return std::make_shared<RusBoostModel>(std::move(trees), std::move(alphas), ds.dim(),
                                         ds.imbalance_rate(), std::move(trace));
}

ModelPtr fit_solution(const StrategySpec& strategy, const ClassifierSpec& clf,
                      const BinaryDataset& ds, std::uint64_t seed) {
  switch (strategy.kind) {
    case StrategyKind::baseline:
      return fit(clf, ds, seed);
    case StrategyKind::class_weight:
      return fit(clf, ds, class_weight_vector(ds), seed);
    case StrategyKind::smote: {
      const int k = positive_int_param(strategy.param("smote.k", kDefaultSmoteK), "smote.k");
      return fit(clf, apply_smote(ds, k, derive_seed(seed, 0x736d6f7465ULL)), seed);
    }
    case StrategyKind::underbagging:
      return fit_underbagging(
          clf, ds, positive_int_param(strategy.param("underbagging.n", 10), "underbagging.n"), seed);
    case StrategyKind::rusboost:
      return fit_rusboost(
          ds, positive_int_param(strategy.param("rusboost.nboost", 10), "rusboost.nboost"), seed);
  }
  throw std::logic_error("fit_solution: unhandled strategy");
}

}  // namespace imbench
