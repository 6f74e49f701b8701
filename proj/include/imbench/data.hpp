#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "imbench/matrix.hpp"

namespace imbench {

enum class Label : std::uint8_t { negative = 0, positive = 1 };

inline bool is_positive(Label l) { return l == Label::positive; }

/// Raised for malformed input files. Row and column are 1-based file
/// coordinates (row 1 is the header); zero means "not applicable".
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, std::size_t row = 0, std::size_t column = 0);
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// A labelled dataset as read from disk, before binarization.
struct Dataset {
  std::string name;
  FeatureMatrix features;
  std::vector<std::string> labels;
  std::vector<std::string> feature_names;
  std::string label_column;
  /// When set, binarize() uses this label as positive instead of the
  /// frequency rule.
  std::optional<std::string> positive_label;
};

/// Binary dataset; positive is the minority class by convention.
struct BinaryDataset {
  std::string name;
  FeatureMatrix features;
  std::vector<Label> labels;
  std::vector<std::string> feature_names;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.cols(); }
  std::size_t positives() const;
  std::size_t negatives() const { return size() - positives(); }
  double imbalance_rate() const;

  std::vector<std::size_t> indices_of(Label label) const;
  BinaryDataset subset(std::span<const std::size_t> indices) const;
};

// --- ingestion -------------------------------------------------------------

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 std::optional<std::string> positive_label = std::nullopt);

/// Writes features plus a label column holding "positive"/"negative".
void write_csv(const BinaryDataset& ds, const std::filesystem::path& path,
               const std::string& label_column = "class");

/// Frequency threshold used by the multiclass rule in binarize().
inline constexpr double kPositiveFrequencyFloor = 0.05;

/// Multiclass: positive is the least frequent class among those above 5%;
/// if no class is above 5%, the most frequent class. Binary: the less
/// frequent class. Ties go to the lexicographically smallest label.
BinaryDataset binarize(const Dataset& ds);

// --- controlled imbalance --------------------------------------------------

inline constexpr std::size_t kMinPositives = 10;

/// Removes random positives (rate above target) or random negatives (rate
/// below target) so the result has the largest positive count p with
/// p / (p + negatives) <= target. Throws std::domain_error when fewer than
/// `min_positives` would remain.
BinaryDataset rebalance_to_rate(const BinaryDataset& ds, double target_rate,
                                std::uint64_t seed, std::size_t min_positives = kMinPositives);

struct ImbalanceLevel {
  double rate = 0.0;
  std::optional<BinaryDataset> dataset;
  std::string skip_reason;
};

/// Produces nested versions of `ds` for every requested rate: rates are
/// processed in decreasing order, each level a subset of the previous one.
/// Unreachable levels carry a skip reason instead of a dataset. The result
/// preserves the order of `rates`.
std::vector<ImbalanceLevel> nested_levels(const BinaryDataset& ds, const std::vector<double>& rates,
                                          std::uint64_t seed,
                                          std::size_t min_positives = kMinPositives);

// --- splitting -------------------------------------------------------------

struct SplitPlan {
  double test_fraction = 0.2;
  int repetitions = 3;
  int inner_folds = 3;
  std::uint64_t seed = 0;
};

struct IndexSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified holdout: each class contributes round(count * fraction) rows to
/// the test part. Index lists are sorted ascending.
IndexSplit holdout_indices(const BinaryDataset& ds, const SplitPlan& plan, int repetition);

std::pair<BinaryDataset, BinaryDataset> split_holdout(const BinaryDataset& ds,
                                                      const SplitPlan& plan, int repetition);

struct IndexFold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Stratified k-fold. Within each class the shuffled rows are dealt
/// round-robin, so remainder rows land in the lowest-indexed folds.
std::vector<IndexFold> stratified_fold_indices(const BinaryDataset& ds, int k, std::uint64_t seed);

std::vector<std::pair<BinaryDataset, BinaryDataset>> stratified_kfold(const BinaryDataset& ds,
                                                                      int k, std::uint64_t seed);

// --- synthetic data --------------------------------------------------------

enum class SyntheticFamily { gaussians, clusters };

SyntheticFamily parse_synthetic_family(const std::string& name);
std::string to_string(SyntheticFamily family);

struct SyntheticSpec {
  SyntheticFamily family = SyntheticFamily::gaussians;
  std::size_t n = 1000;
  std::size_t dim = 2;
  double overlap = 0.0;
  double rate = 0.05;
  std::uint64_t seed = 0;
  std::string name;
};

/// gaussians: unit-variance classes whose means differ by 6 * (1 - overlap)
/// standard deviations along the first feature, each truncated to within
/// 2.5 standard deviations of its mean on that feature, so overlap = 0
/// leaves a gap between the classes.
/// clusters: two positive and four negative spherical clusters with random
/// centres in [-4, 4]^dim and spread 0.5 + overlap.
/// The positive count is round(n * rate), at least 1.
BinaryDataset make_synthetic(const SyntheticSpec& spec);

}  // namespace imbench
