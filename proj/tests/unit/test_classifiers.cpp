#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "imbench/classifiers.hpp"
#include "../test_support.hpp"

namespace imbench {
namespace {

ClassifierSpec spec_of(ClassifierKind kind, ParamMap params = {}) { return ClassifierSpec{kind, std::move(params)}; }

double training_accuracy(const Model& m, const BinaryDataset& ds) {
  const auto scores = predict_scores(m, ds.features);
  double hits = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) hits += (scores[i] >= 0.5) == is_positive(ds.labels[i]);
  return hits / static_cast<double>(ds.size());
}

TEST(Classifiers, NamesRoundTrip) {
  for (auto k : {ClassifierKind::cart, ClassifierKind::random_forest, ClassifierKind::gradient_boosting,
                 ClassifierKind::one_nn}) {
    EXPECT_EQ(parse_classifier(to_string(k)), k);
    EXPECT_EQ(parse_classifier(short_name(k)), k);
  }
  EXPECT_THROW(parse_classifier("svm"), std::invalid_argument);
}

TEST(Classifiers, SingleClassGivesConstant) {
  const auto ds = testing::dataset_from({{1}, {2}, {3}}, {1, 1, 1});
  for (auto k : {ClassifierKind::cart, ClassifierKind::random_forest, ClassifierKind::gradient_boosting,
                 ClassifierKind::one_nn}) {
    const auto m = fit(spec_of(k), ds, 1);
    const auto* c = dynamic_cast<const ConstantModel*>(m.get());
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->value(), 1.0);
  }
}

TEST(Classifiers, ScoresInUnitInterval) {
  Rng rng(1);
  const auto ds = testing::random_dataset(rng, 20, 80, 3);
  for (auto k : {ClassifierKind::cart, ClassifierKind::random_forest, ClassifierKind::gradient_boosting,
                 ClassifierKind::one_nn}) {
    const auto m = fit(spec_of(k, k == ClassifierKind::random_forest ? ParamMap{{"ntree", 20}} : ParamMap{}), ds, 3);
    for (double s : predict_scores(*m, ds.features)) {
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
    }
  }
}

TEST(Classifiers, DimensionMismatchRejected) {
  Rng rng(2);
  const auto ds = testing::random_dataset(rng, 5, 10, 2);
  const auto m = fit(spec_of(ClassifierKind::cart), ds, 1);
  EXPECT_THROW(predict_scores(*m, FeatureMatrix(3, 3)), std::invalid_argument);
}

TEST(Classifiers, ValidationRanges) {
  EXPECT_THROW(validate(spec_of(ClassifierKind::random_forest, {{"mtry", 0}}), 3), std::invalid_argument);
  EXPECT_THROW(validate(spec_of(ClassifierKind::random_forest, {{"mtry", 4}}), 3), std::invalid_argument);
  EXPECT_THROW(validate(spec_of(ClassifierKind::random_forest, {{"ntree", 0}}), 3), std::invalid_argument);
  EXPECT_THROW(validate(spec_of(ClassifierKind::gradient_boosting, {{"eta", 0}}), 3), std::invalid_argument);
  EXPECT_THROW(validate(spec_of(ClassifierKind::gradient_boosting, {{"eta", 1.5}}), 3), std::invalid_argument);
  EXPECT_THROW(validate(spec_of(ClassifierKind::gradient_boosting, {{"max_depth", 0}}), 3), std::invalid_argument);
  EXPECT_THROW(validate(spec_of(ClassifierKind::gradient_boosting, {{"nrounds", 0}}), 3), std::invalid_argument);
  EXPECT_NO_THROW(validate(spec_of(ClassifierKind::random_forest, {{"mtry", 3}, {"ntree", 1}}), 3));
  EXPECT_NO_THROW(validate(spec_of(ClassifierKind::gradient_boosting, {{"eta", 1}}), 3));
}

TEST(Classifiers, WeightChecks) {
  Rng rng(3);
  const auto ds = testing::random_dataset(rng, 3, 5, 1);
  const auto spec = spec_of(ClassifierKind::cart);
  EXPECT_THROW(fit(spec, ds, std::vector<double>(7, 1.0), 1), std::invalid_argument);
  EXPECT_THROW(fit(spec, ds, std::vector<double>(8, 0.0), 1), std::invalid_argument);
  std::vector<double> bad(8, 1.0);
  bad[2] = -1;
  EXPECT_THROW(fit(spec, ds, bad, 1), std::invalid_argument);
  bad[2] = std::nan("");
  EXPECT_THROW(fit(spec, ds, bad, 1), std::invalid_argument);
}

TEST(Forest, SingleUnbaggedFullTreeIsCart) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ds = testing::random_dataset(rng, 6, 20, 3);
    const auto forest = fit(spec_of(ClassifierKind::random_forest, {{"ntree", 1}, {"mtry", 3}, {"bootstrap", 0}}), ds, 9);
    const auto cart = fit(spec_of(ClassifierKind::cart), ds, 9);
    const auto* f = dynamic_cast<const ForestModel*>(forest.get());
    const auto* c = dynamic_cast<const CartModel*>(cart.get());
    ASSERT_TRUE(f && c);
    ASSERT_EQ(f->trees().size(), 1u);
    EXPECT_EQ(f->trees()[0], c->tree());
  }
}

TEST(Forest, DeterministicPerSeedAndVotesAreFractions) {
  Rng rng(5);
  const auto ds = testing::random_dataset(rng, 15, 60, 4);
  const auto spec = spec_of(ClassifierKind::random_forest, {{"ntree", 8}});
  const auto a = predict_scores(*fit(spec, ds, 11), ds.features);
  const auto b = predict_scores(*fit(spec, ds, 11), ds.features);
  EXPECT_EQ(a, b);
  for (double s : a) EXPECT_DOUBLE_EQ(s * 8, std::round(s * 8));
  const auto* f = dynamic_cast<const ForestModel*>(fit(spec, ds, 11).get());
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(f->trees().size(), 8u);
  const auto c = predict_scores(*fit(spec, ds, 12), ds.features);
  EXPECT_NE(a, c);
}

TEST(Boosting, LossTraceNonIncreasing) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto ds = testing::random_dataset(rng, 10, 50, 2);
    const auto m = fit(spec_of(ClassifierKind::gradient_boosting, {{"nrounds", 30}, {"eta", 0.1}, {"max_depth", 3}}), ds, 1);
    const auto* gb = dynamic_cast<const GradientBoostingModel*>(m.get());
    ASSERT_NE(gb, nullptr);
    const auto& trace = gb->loss_trace();
    ASSERT_EQ(trace.size(), 31u);
    EXPECT_NEAR(trace[0], 60 * std::log(2.0), 1e-9);  // margin 0 everywhere, unit weights
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + 1e-12);
  }
}

TEST(Boosting, FitsSeparableData) {
  const auto ds = make_synthetic(SyntheticSpec{SyntheticFamily::gaussians, 200, 2, 0.0, 0.2, 3, "sep"});
  const auto m = fit(spec_of(ClassifierKind::gradient_boosting, {{"nrounds", 20}}), ds, 1);
  EXPECT_EQ(training_accuracy(*m, ds), 1.0);
}

TEST(Boosting, MarginIsSumOfTrees) {
  Rng rng(7);
  const auto ds = testing::random_dataset(rng, 10, 30, 2);
  const auto m = fit(spec_of(ClassifierKind::gradient_boosting, {{"nrounds", 5}}), ds, 1);
  const auto* gb = dynamic_cast<const GradientBoostingModel*>(m.get());
  ASSERT_NE(gb, nullptr);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    double sum = gb->base_margin();
    for (const auto& t : gb->trees()) sum += t.predict(ds.features.row(i));
    EXPECT_NEAR(gb->margin(ds.features.row(i)), sum, 1e-12);
    EXPECT_NEAR(gb->score(ds.features.row(i)), 1 / (1 + std::exp(-sum)), 1e-12);
  }
}

TEST(NearestNeighbor, RecallsTrainingRowsAndBreaksTiesLow) {
  Rng rng(8);
  const auto ds = testing::random_dataset(rng, 10, 30, 3);
  const auto m = fit(spec_of(ClassifierKind::one_nn), ds, 1);
  EXPECT_EQ(training_accuracy(*m, ds), 1.0);

  // Query equidistant from a negative at index 0 and a positive at index 1.
  const auto tie = testing::dataset_from({{-1}, {1}, {5}}, {0, 1, 1});
  const auto nn = fit(spec_of(ClassifierKind::one_nn), tie, 1);
  const double q[] = {0.0};
  EXPECT_EQ(nn->score(q), 0.0);
}

TEST(NearestNeighbor, MatchesBruteForce) {
  Rng rng(9);
  const auto train = testing::random_dataset(rng, 10, 40, 2);
  const auto queries = testing::random_dataset(rng, 10, 10, 2);
  const auto m = fit(spec_of(ClassifierKind::one_nn), train, 1);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    double best = 1e300;
    double label = 0;
    for (std::size_t i = 0; i < train.size(); ++i) {
      const double d = std::hypot(train.features(i, 0) - queries.features(q, 0),
                                  train.features(i, 1) - queries.features(q, 1));
      if (d < best) {
        best = d;
        label = is_positive(train.labels[i]) ? 1 : 0;
      }
    }
    EXPECT_EQ(m->score(queries.features.row(q)), label);
  }
}

}  // namespace
}  // namespace imbench
