#include "imbench/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "imbench/random.hpp"

namespace imbench {

namespace {

std::string locate(const std::string& what, std::size_t row, std::size_t column) {
  std::string out = what;
  if (row != 0) out += " (row " + std::to_string(row);
  if (column != 0) out += (row != 0 ? ", column " : " (column ") + std::to_string(column);
  if (row != 0 || column != 0) out += ")";
  return out;
}

// Splits one CSV record. Double-quoted fields may contain commas; embedded
// quotes are written as "".
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool parse_finite(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && std::isfinite(out);
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Largest p with p / (p + negatives) <= rate.
std::size_t max_positives_for(double rate, std::size_t negatives) {
  const double bound = rate * static_cast<double>(negatives) / (1.0 - rate);
  return static_cast<std::size_t>(std::floor(bound * (1.0 + 1e-12)));
}

// Smallest m with positives / (positives + m) <= rate.
std::size_t min_negatives_for(double rate, std::size_t positives) {
  const double bound = static_cast<double>(positives) * (1.0 - rate) / rate;
  return static_cast<std::size_t>(std::ceil(bound * (1.0 - 1e-12)));
}

std::vector<std::size_t> sorted_prefix(std::vector<std::size_t> shuffled, std::size_t count) {
  shuffled.resize(count);
  std::sort(shuffled.begin(), shuffled.end());
  return shuffled;
}

double truncated_normal(Rng& rng, double bound) {
  for (;;) {
    const double z = rng.normal();
    if (std::abs(z) <= bound) return z;
  }
}

}  // namespace

DataError::DataError(const std::string& what, std::size_t row, std::size_t column)
    : std::runtime_error(locate(what, row, column)), row_(row), column_(column) {}

std::size_t BinaryDataset::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::positive));
}

double BinaryDataset::imbalance_rate() const {
  if (labels.empty()) return 0.0;
  return static_cast<double>(positives()) / static_cast<double>(size());
}

std::vector<std::size_t> BinaryDataset::indices_of(Label label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) out.push_back(i);
  }
  return out;
}

BinaryDataset BinaryDataset::subset(std::span<const std::size_t> indices) const {
  BinaryDataset out;
  out.name = name;
  out.feature_names = feature_names;
  out.features = features.select_rows(indices);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) out.labels.push_back(labels[i]);
  return out;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 std::optional<std::string> positive_label) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file '" + path.string() + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_record(line);
  for (auto& h : header) h = trim(h);

  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw DataError("missing label column '" + label_column + "' in '" + path.string() + "'", 1);
  }
  const std::size_t label_pos = static_cast<std::size_t>(label_it - header.begin());

  Dataset ds;
  ds.name = path.stem().string();
  ds.label_column = label_column;
  ds.positive_label = std::move(positive_label);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_pos) ds.feature_names.push_back(header[c]);
  }
  if (ds.feature_names.empty()) throw DataError("no feature columns in '" + path.string() + "'", 1);

  std::vector<double> row(ds.feature_names.size());
  std::size_t row_number = 1;
  FeatureMatrix features(0, ds.feature_names.size());
  while (std::getline(in, line)) {
    ++row_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_record(line);
    if (fields.size() != header.size()) {
      throw DataError("expected " + std::to_string(header.size()) + " fields, found " +
                          std::to_string(fields.size()),
                      row_number);
    }
    std::size_t f = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_pos) continue;
      const std::string cell = trim(fields[c]);
      if (!parse_finite(cell, row[f])) {
        throw DataError("non-numeric or non-finite feature value '" + cell + "' in column '" +
                            header[c] + "'",
                        row_number, c + 1);
      }
      ++f;
    }
    features.append_row(row);
    ds.labels.push_back(trim(fields[label_pos]));
  }
  if (ds.labels.empty()) throw DataError("no data rows in '" + path.string() + "'");
  ds.features = std::move(features);
  return ds;
}

void write_csv(const BinaryDataset& ds, const std::filesystem::path& path,
               const std::string& label_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  for (std::size_t c = 0; c < ds.dim(); ++c) {
    out << (c < ds.feature_names.size() ? ds.feature_names[c] : "x" + std::to_string(c + 1))
        << ',';
  }
  out << label_column << '\n';
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (double v : ds.features.row(r)) out << format_real(v) << ',';
    out << (is_positive(ds.labels[r]) ? "positive" : "negative") << '\n';
  }
}

BinaryDataset binarize(const Dataset& ds) {
  std::map<std::string, std::size_t> counts;
  for (const auto& l : ds.labels) ++counts[l];
  if (counts.size() < 2) {
    throw std::invalid_argument("binarize: dataset '" + ds.name + "' has a single class");
  }

  std::string positive;
  if (ds.positive_label) {
    if (!counts.contains(*ds.positive_label)) {
      throw std::invalid_argument("binarize: positive label '" + *ds.positive_label +
                                  "' does not occur in '" + ds.name + "'");
    }
    positive = *ds.positive_label;
  } else if (counts.size() == 2) {
    auto it = counts.begin();
    const auto& [a, ca] = *it++;
    const auto& [b, cb] = *it;
    positive = cb < ca ? b : a;
  } else {
    const double n = static_cast<double>(ds.labels.size());
    std::optional<std::pair<std::string, std::size_t>> rarest_above;
    std::pair<std::string, std::size_t> most_frequent{"", 0};
    for (const auto& [label, count] : counts) {
      if (static_cast<double>(count) / n > kPositiveFrequencyFloor &&
          (!rarest_above || count < rarest_above->second)) {
        rarest_above = {label, count};
      }
      if (count > most_frequent.second) most_frequent = {label, count};
    }
    positive = rarest_above ? rarest_above->first : most_frequent.first;
  }

  BinaryDataset out;
  out.name = ds.name;
  out.features = ds.features;
  out.feature_names = ds.feature_names;
  out.labels.reserve(ds.labels.size());
  for (const auto& l : ds.labels) out.labels.push_back(l == positive ? Label::positive : Label::negative);
  return out;
}

BinaryDataset rebalance_to_rate(const BinaryDataset& ds, double target_rate, std::uint64_t seed,
                                std::size_t min_positives) {
  if (!(target_rate > 0.0 && target_rate < 1.0)) {
    throw std::invalid_argument("rebalance_to_rate: target rate must lie in (0, 1)");
  }
  auto pos = ds.indices_of(Label::positive);
  auto neg = ds.indices_of(Label::negative);

  std::size_t keep_pos = pos.size();
  std::size_t keep_neg = neg.size();
  const std::size_t pos_cap = max_positives_for(target_rate, neg.size());
  if (pos.size() > pos_cap) {
    keep_pos = pos_cap;
  } else {
    keep_neg = std::min(neg.size(), min_negatives_for(target_rate, pos.size()));
  }
  if (keep_pos < min_positives) {
    throw std::domain_error("rebalance_to_rate: rate " + format_real(target_rate) + " for '" +
                            ds.name + "' leaves " + std::to_string(keep_pos) +
                            " positives, below the floor of " + std::to_string(min_positives));
  }
  if (keep_pos == pos.size() && keep_neg == neg.size()) return ds;

  Rng rng(seed);
  rng.shuffle(std::span(pos));
  rng.shuffle(std::span(neg));
  auto kept = sorted_prefix(std::move(pos), keep_pos);
  const auto kept_neg = sorted_prefix(std::move(neg), keep_neg);
  kept.insert(kept.end(), kept_neg.begin(), kept_neg.end());
  std::sort(kept.begin(), kept.end());
  return ds.subset(kept);
}

std::vector<ImbalanceLevel> nested_levels(const BinaryDataset& ds, const std::vector<double>& rates,
                                          std::uint64_t seed, std::size_t min_positives) {
  std::vector<std::size_t> order(rates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rates[a] > rates[b]; });

  std::vector<ImbalanceLevel> levels(rates.size());
  const BinaryDataset* previous = &ds;
  std::uint64_t step = 0;
  for (std::size_t idx : order) {
    levels[idx].rate = rates[idx];
    try {
      levels[idx].dataset =
          rebalance_to_rate(*previous, rates[idx], derive_seed(seed, step++), min_positives);
      previous = &*levels[idx].dataset;
    } catch (const std::domain_error& e) {
      levels[idx].skip_reason = e.what();
    }
  }
  return levels;
}

IndexSplit holdout_indices(const BinaryDataset& ds, const SplitPlan& plan, int repetition) {
  if (!(plan.test_fraction > 0.0 && plan.test_fraction < 1.0)) {
    throw std::invalid_argument("split_holdout: test fraction must lie in (0, 1)");
  }
  if (repetition < 0 || repetition >= plan.repetitions) {
    throw std::invalid_argument("split_holdout: repetition out of range");
  }
  auto pos = ds.indices_of(Label::positive);
  auto neg = ds.indices_of(Label::negative);
  const auto test_pos = static_cast<std::size_t>(std::lround(pos.size() * plan.test_fraction));
  const auto test_neg = static_cast<std::size_t>(std::lround(neg.size() * plan.test_fraction));
  if (test_pos < 2 || test_pos >= pos.size()) {
    throw std::domain_error("split_holdout: " + std::to_string(pos.size()) +
                            " positives are too few to stratify a test set with at least two");
  }
  if (test_neg < 1 || test_neg >= neg.size()) {
    throw std::domain_error("split_holdout: too few negatives to stratify");
  }

  Rng rng(derive_seed(plan.seed, static_cast<std::uint64_t>(repetition)));
  rng.shuffle(std::span(pos));
  rng.shuffle(std::span(neg));

  IndexSplit split;
  split.test.assign(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(test_pos));
  split.test.insert(split.test.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(test_neg));
  split.train.assign(pos.begin() + static_cast<std::ptrdiff_t>(test_pos), pos.end());
  split.train.insert(split.train.end(), neg.begin() + static_cast<std::ptrdiff_t>(test_neg), neg.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

std::pair<BinaryDataset, BinaryDataset> split_holdout(const BinaryDataset& ds,
                                                      const SplitPlan& plan, int repetition) {
  const auto split = holdout_indices(ds, plan, repetition);
  return {ds.subset(split.train), ds.subset(split.test)};
}

std::vector<IndexFold> stratified_fold_indices(const BinaryDataset& ds, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_kfold: k must be at least 2");
  auto pos = ds.indices_of(Label::positive);
  auto neg = ds.indices_of(Label::negative);
  const auto folds = static_cast<std::size_t>(k);
  if (pos.size() < folds) {
    throw std::domain_error("stratified_kfold: " + std::to_string(pos.size()) +
                            " positives cannot fill " + std::to_string(k) + " folds");
  }
  if (neg.size() < folds) {
    throw std::domain_error("stratified_kfold: " + std::to_string(neg.size()) +
                            " negatives cannot fill " + std::to_string(k) + " folds");
  }

  Rng rng(seed);
  rng.shuffle(std::span(pos));
  rng.shuffle(std::span(neg));

  std::vector<std::size_t> fold_of(ds.size());
  for (std::size_t i = 0; i < pos.size(); ++i) fold_of[pos[i]] = i % folds;
  for (std::size_t i = 0; i < neg.size(); ++i) fold_of[neg[i]] = i % folds;

  std::vector<IndexFold> out(folds);
  for (std::size_t row = 0; row < ds.size(); ++row) {
    for (std::size_t f = 0; f < folds; ++f) {
      (fold_of[row] == f ? out[f].validation : out[f].train).push_back(row);
    }
  }
  return out;
}

std::vector<std::pair<BinaryDataset, BinaryDataset>> stratified_kfold(const BinaryDataset& ds,
                                                                      int k, std::uint64_t seed) {
  std::vector<std::pair<BinaryDataset, BinaryDataset>> out;
  for (const auto& fold : stratified_fold_indices(ds, k, seed)) {
    out.emplace_back(ds.subset(fold.train), ds.subset(fold.validation));
  }
  return out;
}

SyntheticFamily parse_synthetic_family(const std::string& name) {
  if (name == "gaussians") return SyntheticFamily::gaussians;
  if (name == "clusters") return SyntheticFamily::clusters;
  throw std::invalid_argument("unknown synthetic family '" + name + "'");
}

std::string to_string(SyntheticFamily family) {
  return family == SyntheticFamily::gaussians ? "gaussians" : "clusters";
}

BinaryDataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.n == 0 || spec.dim == 0) {
    throw std::invalid_argument("make_synthetic: n and dim must be positive");
  }
  if (!(spec.overlap >= 0.0)) throw std::invalid_argument("make_synthetic: overlap must be >= 0");
  if (!(spec.rate > 0.0 && spec.rate < 1.0)) {
    throw std::invalid_argument("make_synthetic: rate must lie in (0, 1)");
  }
  const auto n_pos = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(static_cast<double>(spec.n) * spec.rate)), 1, spec.n);

  Rng rng(spec.seed);
  std::vector<Label> labels(spec.n, Label::negative);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_pos), Label::positive);
  rng.shuffle(std::span(labels));

  FeatureMatrix x(spec.n, spec.dim);
  if (spec.family == SyntheticFamily::gaussians) {
    const double separation = 6.0 * (1.0 - std::min(spec.overlap, 1.0));
    for (std::size_t r = 0; r < spec.n; ++r) {
      x(r, 0) = truncated_normal(rng, 2.5) + (is_positive(labels[r]) ? separation : 0.0);
      for (std::size_t c = 1; c < spec.dim; ++c) x(r, c) = rng.normal();
    }
  } else {
    constexpr std::size_t kPositiveClusters = 2;
    constexpr std::size_t kNegativeClusters = 4;
    FeatureMatrix centres(kPositiveClusters + kNegativeClusters, spec.dim);
    for (std::size_t k = 0; k < centres.rows(); ++k) {
      for (std::size_t c = 0; c < spec.dim; ++c) centres(k, c) = rng.uniform(-4.0, 4.0);
    }
    const double spread = 0.5 + spec.overlap;
    for (std::size_t r = 0; r < spec.n; ++r) {
      const std::size_t k = is_positive(labels[r])
                                ? rng.below(kPositiveClusters)
                                : kPositiveClusters + rng.below(kNegativeClusters);
      for (std::size_t c = 0; c < spec.dim; ++c) x(r, c) = centres(k, c) + spread * rng.normal();
    }
  }

  BinaryDataset out;
  out.features = std::move(x);
  out.labels = std::move(labels);
  for (std::size_t c = 0; c < spec.dim; ++c) out.feature_names.push_back("x" + std::to_string(c + 1));
  if (spec.name.empty()) {
    std::ostringstream name;
    name << to_string(spec.family) << "-n" << spec.n << "-d" << spec.dim << "-o" << spec.overlap
         << "-s" << spec.seed;
    out.name = name.str();
  } else {
    out.name = spec.name;
  }
  return out;
}

}  // namespace imbench
