#include "imbench/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "imbench/strategies.hpp"
#include "json.hpp"

namespace imbench {

namespace {

using nlohmann::json;

json tree_to_json(const DecisionTree& tree) {
  json feature = json::array(), threshold = json::array(), left = json::array(),
       right = json::array(), value = json::array();
  for (const auto& n : tree.nodes()) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

DecisionTree tree_from_json(const json& j) {
  const auto& feature = j.at("feature");
  std::vector<TreeNode> nodes(feature.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes[i].feature = feature.at(i).get<std::int32_t>();
    nodes[i].threshold = j.at("threshold").at(i).get<double>();
    nodes[i].left = j.at("left").at(i).get<std::int32_t>();
    nodes[i].right = j.at("right").at(i).get<std::int32_t>();
    nodes[i].value = j.at("value").at(i).get<double>();
    const auto n = static_cast<std::int32_t>(nodes.size());
    if (nodes[i].feature >= 0 && (nodes[i].left <= static_cast<std::int32_t>(i) || nodes[i].left >= n ||
                                  nodes[i].right <= static_cast<std::int32_t>(i) || nodes[i].right >= n)) {
      throw std::runtime_error("model file: malformed tree node " + std::to_string(i));
    }
  }
  if (nodes.empty()) throw std::runtime_error("model file: empty tree");
  return DecisionTree(std::move(nodes));
}

json trees_to_json(const std::vector<DecisionTree>& trees) {
  json out = json::array();
  for (const auto& t : trees) out.push_back(tree_to_json(t));
  return out;
}

std::vector<DecisionTree> trees_from_json(const json& j) {
  std::vector<DecisionTree> out;
  for (const auto& t : j) out.push_back(tree_from_json(t));
  return out;
}

json to_json(const Model& model) {
  json j{{"kind", model.kind()}, {"dim", model.dim()}};
  if (const auto* m = dynamic_cast<const ConstantModel*>(&model)) {
    j["value"] = m->value();
  } else if (const auto* m = dynamic_cast<const CartModel*>(&model)) {
    j["tree"] = tree_to_json(m->tree());
  } else if (const auto* m = dynamic_cast<const ForestModel*>(&model)) {
    j["trees"] = trees_to_json(m->trees());
  } else if (const auto* m = dynamic_cast<const GradientBoostingModel*>(&model)) {
    j["base_margin"] = m->base_margin();
    j["trees"] = trees_to_json(m->trees());
  } else if (const auto* m = dynamic_cast<const NearestNeighborModel*>(&model)) {
    j["features"] = m->features().values();
    json labels = json::array();
    for (Label l : m->labels()) labels.push_back(is_positive(l) ? 1 : 0);
    j["labels"] = labels;
  } else if (const auto* m = dynamic_cast<const AveragingEnsemble*>(&model)) {
    json members = json::array();
    for (const auto& member : m->members()) members.push_back(to_json(*member));
    j["members"] = members;
  } else if (const auto* m = dynamic_cast<const RusBoostModel*>(&model)) {
    j["trees"] = trees_to_json(m->trees());
    j["alphas"] = m->alphas();
    j["fallback"] = m->fallback();
  } else {
    throw std::invalid_argument("serialize_model: unsupported model kind '" + model.kind() + "'");
  }
  return j;
}

ModelPtr from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const auto dim = j.at("dim").get<std::size_t>();
  if (kind == "constant") return std::make_shared<ConstantModel>(j.at("value").get<double>(), dim);
  if (kind == "cart") return std::make_shared<CartModel>(tree_from_json(j.at("tree")), dim);
  if (kind == "random_forest") return std::make_shared<ForestModel>(trees_from_json(j.at("trees")), dim);
  if (kind == "gradient_boosting") {
    return std::make_shared<GradientBoostingModel>(trees_from_json(j.at("trees")),
                                                   j.at("base_margin").get<double>(), dim);
  }
  if (kind == "one_nn") {
    auto values = j.at("features").get<std::vector<double>>();
    std::vector<Label> labels;
    for (const auto& l : j.at("labels")) labels.push_back(l.get<int>() != 0 ? Label::positive : Label::negative);
    if (dim == 0 || values.size() != labels.size() * dim) {
      throw std::runtime_error("model file: one_nn feature block has the wrong size");
    }
    const std::size_t rows = labels.size();
    return std::make_shared<NearestNeighborModel>(FeatureMatrix(rows, dim, std::move(values)), std::move(labels));
  }
  if (kind == "averaging_ensemble") {
    std::vector<ModelPtr> members;
    for (const auto& m : j.at("members")) members.push_back(from_json(m));
    return std::make_shared<AveragingEnsemble>(std::move(members));
  }
  if (kind == "rusboost") {
    return std::make_shared<RusBoostModel>(trees_from_json(j.at("trees")),
                                           j.at("alphas").get<std::vector<double>>(), dim,
                                           j.at("fallback").get<double>());
  }
  throw std::runtime_error("model file: unknown model kind '" + kind + "'");
}

}  // namespace

std::string serialize_model(const Model& model) {
  const json doc{{"format", "imbench-model"}, {"version", 1}, {"model", to_json(model)}};
  return doc.dump();
}

ModelPtr deserialize_model(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format") != "imbench-model" || doc.at("version") != 1) {
      throw std::runtime_error("model file: unsupported format or version");
    }
    return from_json(doc.at("model"));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("model file: ") + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file '" + path.string() + "'");
  out << serialize_model(model) << '\n';
}

ModelPtr load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read model file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace imbench
