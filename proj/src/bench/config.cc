#include "shapley/bench/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "shapley/errors.hpp"

namespace shapley::bench {

using nlohmann::json;

namespace {

const std::set<std::string> kSampling = {"semivalue", "appro_shapley", "ime", "kernel_shap", "sgd_shapley",
                                         "multilinear"};
const std::set<std::string> kExact = {"linear_shap", "interventional_tree_shap", "path_dependent_tree_shap",
                                      "brute_force"};

void reject_unknown(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

json estimator_to_json(const EstimatorSpec& e) {
  return json{{"name", e.name},
              {"antithetic", e.antithetic},
              {"adaptive", e.adaptive},
              {"paired", e.paired},
              {"feature_wise", e.feature_wise},
              {"normalize", e.normalize},
              {"sampling", e.sampling},
              {"q_nodes", e.q_nodes},
              {"pilot", e.pilot},
              {"sgd_c", e.sgd_c},
              {"sgd_t0", e.sgd_t0}};
}

EstimatorSpec estimator_from_json(const json& j, std::size_t index) {
  const std::string where = "estimators[" + std::to_string(index) + "]";
  reject_unknown(j, {"name", "antithetic", "adaptive", "paired", "feature_wise", "normalize", "sampling", "q_nodes",
                     "pilot", "sgd_c", "sgd_t0"},
                 where);
  EstimatorSpec e;
  read(j, "name", e.name, where);
  read(j, "antithetic", e.antithetic, where);
  read(j, "adaptive", e.adaptive, where);
  read(j, "paired", e.paired, where);
  read(j, "feature_wise", e.feature_wise, where);
  read(j, "normalize", e.normalize, where);
  read(j, "sampling", e.sampling, where);
  read(j, "q_nodes", e.q_nodes, where);
  read(j, "pilot", e.pilot, where);
  read(j, "sgd_c", e.sgd_c, where);
  read(j, "sgd_t0", e.sgd_t0, where);
  return e;
}

}  // namespace

std::vector<EstimatorSpec> default_estimators() {
  std::vector<EstimatorSpec> out(9);
  out[0].name = "appro_shapley";
  out[1].name = "appro_shapley";
  out[1].antithetic = true;
  out[2].name = "ime";
  out[2].adaptive = true;
  out[3].name = "kernel_shap";
  out[4].name = "kernel_shap";
  out[4].paired = true;
  out[5].name = "sgd_shapley";
  out[6].name = "multilinear";
  out[7].name = "multilinear";
  out[7].sampling = "random";
  out[8].name = "interventional_tree_shap";
  return out;
}

std::string EstimatorSpec::variant() const {
  std::string out;
  auto add = [&](const std::string& flag) { out += (out.empty() ? "" : "+") + flag; };
  if (antithetic) add("antithetic");
  if (adaptive) add("adaptive");
  if (paired) add("paired");
  if (feature_wise) add("feature_wise");
  if (name == "multilinear") add(sampling == "random" ? "random_q" : "trapezoid");
  if (normalize) add("normalized");
  return out.empty() ? "plain" : out;
}

bool EstimatorSpec::is_exact() const { return kExact.count(name) > 0; }

void ExperimentConfig::validate() const {
  if (estimators.empty()) throw ConfigError("config lists no estimators");
  for (const EstimatorSpec& e : estimators) {
    if (!kSampling.count(e.name) && !kExact.count(e.name)) throw ConfigError("unknown estimator '" + e.name + "'");
    if (e.sampling != "trapezoid" && e.sampling != "random") {
      throw ConfigError("estimator " + e.name + ": sampling must be 'trapezoid' or 'random'");
    }
    if (e.name == "semivalue" && e.normalize) throw ConfigError("semivalue estimates carry no game endpoints to normalize");
    if (e.name == "multilinear" && e.adaptive && !e.feature_wise) {
      throw ConfigError("multilinear: adaptive sampling requires feature_wise");
    }
  }
  if (budgets.empty()) throw ConfigError("budget grid is empty");
  for (std::size_t k = 0; k < budgets.size(); ++k) {
    if (budgets[k] == 0) throw ConfigError("budgets must be positive");
    if (k > 0 && budgets[k] <= budgets[k - 1]) throw ConfigError("budgets must be strictly increasing");
  }
  if (n_trials == 0) throw ConfigError("n_trials must be positive");
  static const std::set<std::string> strategies = {"baseline", "marginal", "uniform", "product_marginals",
                                                   "conditional_gaussian"};
  if (!strategies.count(strategy)) throw ConfigError("unknown removal strategy '" + strategy + "'");
  if (strategy == "baseline" && baseline_rows.size() != 1) {
    throw ConfigError("the baseline strategy takes exactly one baseline row");
  }
  if (model.kind != "boosted_trees" && model.kind != "linear" && model.kind != "file") {
    throw ConfigError("model.kind must be boosted_trees, linear or file");
  }
  if (model.kind == "file" && model.path.empty()) throw ConfigError("model.kind=file needs model.path");
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json estimators = json::array();
  for (const auto& e : cfg.estimators) estimators.push_back(estimator_to_json(e));
  const BoostingConfig& b = cfg.model.boosting;
  json j = {
      {"dataset",
       {{"path", cfg.dataset_path},
        {"target", cfg.target},
        {"synthetic",
         {{"n_rows", cfg.synthetic.n_rows},
          {"d", cfg.synthetic.d},
          {"rho", cfg.synthetic.rho},
          {"noise", cfg.synthetic.noise},
          {"seed", cfg.synthetic.seed}}}}},
      {"model",
       {{"kind", cfg.model.kind},
        {"path", cfg.model.path},
        {"n_trees", b.n_trees},
        {"max_depth", b.max_depth},
        {"learning_rate", b.learning_rate},
        {"min_samples", b.min_samples},
        {"subsample", b.subsample},
        {"seed", b.seed}}},
      {"removal", {{"strategy", cfg.strategy}, {"baseline_rows", cfg.baseline_rows}, {"n_draws", cfg.n_draws}}},
      {"explicand_row", cfg.explicand_row},
      {"estimators", estimators},
      {"budgets", cfg.budgets},
      {"n_trials", cfg.n_trials},
      {"seed", cfg.seed},
      {"dummies", cfg.dummies},
  };
  return j.dump();
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j, {"dataset", "model", "removal", "explicand_row", "estimators", "budgets", "n_trials", "seed",
                     "dummies"},
                 "config");
  ExperimentConfig cfg;
  if (j.contains("dataset")) {
    const json& d = j["dataset"];
    reject_unknown(d, {"path", "target", "synthetic"}, "dataset");
    read(d, "path", cfg.dataset_path, "dataset");
    read(d, "target", cfg.target, "dataset");
    if (d.contains("synthetic")) {
      const json& s = d["synthetic"];
      reject_unknown(s, {"n_rows", "d", "rho", "noise", "seed"}, "dataset.synthetic");
      read(s, "n_rows", cfg.synthetic.n_rows, "dataset.synthetic");
      read(s, "d", cfg.synthetic.d, "dataset.synthetic");
      read(s, "rho", cfg.synthetic.rho, "dataset.synthetic");
      read(s, "noise", cfg.synthetic.noise, "dataset.synthetic");
      read(s, "seed", cfg.synthetic.seed, "dataset.synthetic");
    }
  }
  if (j.contains("model")) {
    const json& m = j["model"];
    reject_unknown(m, {"kind", "path", "n_trees", "max_depth", "learning_rate", "min_samples", "subsample", "seed"},
                   "model");
    read(m, "kind", cfg.model.kind, "model");
    read(m, "path", cfg.model.path, "model");
    read(m, "n_trees", cfg.model.boosting.n_trees, "model");
    read(m, "max_depth", cfg.model.boosting.max_depth, "model");
    read(m, "learning_rate", cfg.model.boosting.learning_rate, "model");
    read(m, "min_samples", cfg.model.boosting.min_samples, "model");
    read(m, "subsample", cfg.model.boosting.subsample, "model");
    read(m, "seed", cfg.model.boosting.seed, "model");
  }
  if (j.contains("removal")) {
    const json& r = j["removal"];
    reject_unknown(r, {"strategy", "baseline_rows", "n_draws"}, "removal");
    read(r, "strategy", cfg.strategy, "removal");
    read(r, "baseline_rows", cfg.baseline_rows, "removal");
    read(r, "n_draws", cfg.n_draws, "removal");
  }
  read(j, "explicand_row", cfg.explicand_row, "config");
  if (j.contains("estimators")) {
    if (!j["estimators"].is_array()) throw ConfigError("estimators must be an array");
    cfg.estimators.clear();
    for (std::size_t k = 0; k < j["estimators"].size(); ++k) {
      cfg.estimators.push_back(estimator_from_json(j["estimators"][k], k));
    }
  }
  read(j, "budgets", cfg.budgets, "config");
  read(j, "n_trials", cfg.n_trials, "config");
  read(j, "seed", cfg.seed, "config");
  read(j, "dummies", cfg.dummies, "config");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config_to_json(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::uint64_t> parse_budget_list(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    // Integers, or exact integers in scientific form such as 1e5.
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() || !(v >= 0.0) || v > 1e18 ||
        v != std::floor(v)) {
      throw ConfigError("bad budget '" + item + "' in --budgets");
    }
    out.push_back(static_cast<std::uint64_t>(v));
  }
  if (out.empty()) throw ConfigError("--budgets is empty");
  return out;
}

}  // namespace shapley::bench
