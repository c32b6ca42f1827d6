#include "shapley/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "shapley/errors.hpp"

namespace shapley {
namespace {

using nlohmann::json;

constexpr int kVersion = 1;

json tree_to_json(const Tree& tree) {
  json feature = json::array(), threshold = json::array(), left = json::array(),
       right = json::array(), leaf_value = json::array(), cover = json::array();
  for (const TreeNode& n : tree.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    leaf_value.push_back(n.leaf_value);
    cover.push_back(n.cover);
  }
  return json{{"feature", feature}, {"threshold", threshold}, {"left", left},
              {"right", right},     {"leaf_value", leaf_value}, {"cover", cover}};
}

Tree tree_from_json(const json& j) {
  const auto& feature = j.at("feature");
  const std::size_t n = feature.size();
  for (const char* key : {"threshold", "left", "right", "leaf_value", "cover"}) {
    if (j.at(key).size() != n) throw ModelError(std::string("tree array '") + key + "' length mismatch");
  }
  Tree tree;
  tree.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    TreeNode& node = tree.nodes[i];
    node.feature = feature[i].get<std::int32_t>();
    node.threshold = j["threshold"][i].get<double>();
    node.left = j["left"][i].get<std::int32_t>();
    node.right = j["right"][i].get<std::int32_t>();
    node.leaf_value = j["leaf_value"][i].get<double>();
    node.cover = j["cover"][i].get<double>();
  }
  tree.validate();
  return tree;
}

}  // namespace

std::string model_to_json(const Model& model) {
  json j;
  if (const auto* lin = std::get_if<LinearModel>(&model)) {
    j = json{{"format", "linear"}, {"version", kVersion}, {"beta0", lin->beta0}, {"beta", lin->beta}};
  } else {
    const auto& ens = std::get<TreeEnsemble>(model);
    json trees = json::array();
    for (const Tree& t : ens.trees) trees.push_back(tree_to_json(t));
    j = json{{"format", "tree_ensemble"}, {"version", kVersion}, {"base_score", ens.base_score}, {"trees", trees}};
  }
  return j.dump(1) + "\n";
}

Model model_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("version").get<int>() != kVersion) throw ModelError("unsupported model file version");
    const auto format = j.at("format").get<std::string>();
    if (format == "linear") {
      LinearModel lin;
      lin.beta0 = j.at("beta0").get<double>();
      lin.beta = j.at("beta").get<std::vector<double>>();
      return lin;
    }
    if (format == "tree_ensemble") {
      TreeEnsemble ens;
      ens.base_score = j.at("base_score").get<double>();
      for (const auto& t : j.at("trees")) ens.trees.push_back(tree_from_json(t));
      return ens;
    }
    throw ModelError("unknown model format '" + format + "'");
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file " + path.string());
  out << model_to_json(model);
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read model file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace shapley
