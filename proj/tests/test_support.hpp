#pragma once

// Helpers shared by the unit and acceptance tests.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "imbench/data.hpp"
#include "imbench/experiment.hpp"
#include "imbench/random.hpp"

namespace imbench::testing {

inline BinaryDataset random_dataset(Rng& rng, std::size_t positives, std::size_t negatives, std::size_t dim,
                                    bool integer_grid = false) {
  BinaryDataset ds;
  ds.name = "random";
  ds.features = FeatureMatrix(positives + negatives, dim);
  for (std::size_t r = 0; r < positives + negatives; ++r) {
    const bool pos = r < positives;
    for (std::size_t c = 0; c < dim; ++c) {
      ds.features(r, c) = integer_grid ? static_cast<double>(rng.below(5)) + (pos ? 1.0 : 0.0)
                                       : rng.normal() + (pos ? 1.0 : 0.0);
    }
    ds.labels.push_back(pos ? Label::positive : Label::negative);
  }
  for (std::size_t c = 0; c < dim; ++c) ds.feature_names.push_back("x" + std::to_string(c + 1));
  return ds;
}

inline BinaryDataset dataset_from(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
  BinaryDataset ds;
  ds.name = "inline";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ds.features.append_row(rows[i]);
    ds.labels.push_back(labels[i] ? Label::positive : Label::negative);
  }
  for (std::size_t c = 0; c < ds.features.cols(); ++c) ds.feature_names.push_back("x" + std::to_string(c + 1));
  return ds;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// A fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("imbench-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Twelve small synthetic problems at 5% imbalance: six gaussian pairs and
/// six cluster mixtures with increasing overlap.
inline std::vector<DatasetSource> benchmark_sources() {
  std::vector<DatasetSource> out;
  const double gaussian_overlap[] = {0.4, 0.5, 0.6, 0.7, 0.75, 0.8};
  const double cluster_overlap[] = {0.2, 0.4, 0.6, 0.8, 1.0, 1.2};
  for (int i = 0; i < 6; ++i) {
    DatasetSource s;
    s.name = "gauss" + std::to_string(i);
    s.synthetic = SyntheticSpec{SyntheticFamily::gaussians, 500, static_cast<std::size_t>(2 + i % 4),
                                gaussian_overlap[i], 0.05, static_cast<std::uint64_t>(100 + i), s.name};
    out.push_back(s);
  }
  for (int i = 0; i < 6; ++i) {
    DatasetSource s;
    s.name = "clust" + std::to_string(i);
    s.synthetic = SyntheticSpec{SyntheticFamily::clusters, 500, static_cast<std::size_t>(2 + i % 4),
                                cluster_overlap[i], 0.05, static_cast<std::uint64_t>(200 + i), s.name};
    out.push_back(s);
  }
  return out;
}

/// Benchmark grid over benchmark_sources() with the forest restricted to
/// 16..64 trees to keep a single-core run short.
inline ExperimentConfig benchmark_config(const std::vector<StrategyKind>& strategies,
                                         const std::vector<ClassifierKind>& classifiers,
                                         const std::vector<MetricKind>& metrics,
                                         const std::filesystem::path& output) {
  ExperimentConfig cfg;
  cfg.datasets = benchmark_sources();
  cfg.rates = {0.05};
  cfg.metrics = metrics;
  cfg.repetitions = 3;
  cfg.master_seed = 2024;
  cfg.output_path = output;
  bool rusboost = false;
  for (StrategyKind s : strategies) {
    if (s == StrategyKind::rusboost) {
      rusboost = true;
      continue;
    }
    for (ClassifierKind c : classifiers) {
      SolutionSpec sol = make_solution(s, c);
      for (auto& d : sol.space) {
        if (d.name == "ntree") d.hi = 64;
      }
      cfg.solutions.push_back(sol);
    }
  }
  if (rusboost) cfg.solutions.push_back(make_solution(StrategyKind::rusboost));
  return cfg;
}

}  // namespace imbench::testing
