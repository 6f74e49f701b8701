#include <gtest/gtest.h>

#include <stdexcept>

#include "imbench/model_io.hpp"
#include "imbench/strategies.hpp"
#include "../test_support.hpp"

namespace imbench {
namespace {

void expect_identical_scores(const Model& a, const Model& b, const FeatureMatrix& x) {
  EXPECT_EQ(a.kind(), b.kind());
  EXPECT_EQ(a.dim(), b.dim());
  EXPECT_EQ(predict_scores(a, x), predict_scores(b, x));
}

class ModelRoundTrip : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng rng(1);
    train = testing::random_dataset(rng, 15, 60, 3);
    probe = testing::random_dataset(rng, 20, 20, 3).features;
  }
  BinaryDataset train;
  FeatureMatrix probe;
};

TEST_F(ModelRoundTrip, BaseClassifiers) {
  for (auto k : {ClassifierKind::cart, ClassifierKind::random_forest, ClassifierKind::gradient_boosting,
                 ClassifierKind::one_nn}) {
    const ClassifierSpec spec{k, k == ClassifierKind::random_forest ? ParamMap{{"ntree", 10}} : ParamMap{}};
    const auto m = fit(spec, train, 4);
    expect_identical_scores(*m, *deserialize_model(serialize_model(*m)), probe);
  }
}

TEST_F(ModelRoundTrip, EnsemblesAndConstant) {
  const auto ub = fit_underbagging(ClassifierSpec{ClassifierKind::gradient_boosting, {{"nrounds", 5}}}, train, 3, 2);
  expect_identical_scores(*ub, *deserialize_model(serialize_model(*ub)), probe);
  const auto rb = fit_rusboost(train, 5, 2);
  const auto back = deserialize_model(serialize_model(*rb));
  expect_identical_scores(*rb, *back, probe);
  EXPECT_EQ(dynamic_cast<const RusBoostModel&>(*back).alphas(), rb->alphas());
  const ConstantModel c(0.125, 3);
  expect_identical_scores(c, *deserialize_model(serialize_model(c)), probe);
}

TEST_F(ModelRoundTrip, FileSaveLoad) {
  const auto m = fit(ClassifierSpec{ClassifierKind::cart, {}}, train, 1);
  const auto path = testing::scratch_dir("model-io") / "cart.json";
  save_model(*m, path);
  expect_identical_scores(*m, *load_model(path), probe);
}

TEST(ModelIo, RejectsBadDocuments) {
  EXPECT_THROW(deserialize_model("not json"), std::exception);
  EXPECT_THROW(deserialize_model(R"({"format":"other","version":1,"model":{}})"), std::exception);
  EXPECT_THROW(deserialize_model(R"({"format":"imbench-model","version":2,"model":{"kind":"constant","dim":1,"value":0}})"),
               std::exception);
  EXPECT_THROW(deserialize_model(R"({"format":"imbench-model","version":1,"model":{"kind":"svm","dim":1}})"),
               std::exception);
}

}  // namespace
}  // namespace imbench
