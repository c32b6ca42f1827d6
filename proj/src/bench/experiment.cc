#include "shapley/bench/experiment.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "shapley/errors.hpp"
#include "shapley/estimators.hpp"
#include "shapley/exact.hpp"
#include "shapley/game_core.hpp"
#include "shapley/gaussian.hpp"
#include "shapley/model_io.hpp"
#include "shapley/random.hpp"
#include "shapley/trainer.hpp"

namespace shapley::bench {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

GaussianDistribution fit_gaussian(const DataMatrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n < 2) throw DataError("conditional_gaussian needs at least two data rows to fit a covariance");
  GaussianDistribution dist;
  dist.mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  dist.sigma = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) dist.mu(static_cast<Eigen::Index>(c)) += x(r, c);
  }
  dist.mu /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t a = 0; a < d; ++a) {
      const double da = x(r, a) - dist.mu(static_cast<Eigen::Index>(a));
      for (std::size_t b = 0; b < d; ++b) {
        dist.sigma(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
            da * (x(r, b) - dist.mu(static_cast<Eigen::Index>(b)));
      }
    }
  }
  dist.sigma /= static_cast<double>(n - 1);
  return dist;
}

// Runs fn(0..n-1) on `jobs` threads; rethrows the first failure by index order.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, n));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

Model build_model(const ExperimentConfig& cfg, const Dataset& data) {
  if (cfg.model.kind == "file") {
    Model model = load_model(cfg.model.path);
    if (required_features(model) > data.num_features()) {
      throw DataError("model uses " + std::to_string(required_features(model)) + " features, dataset has " +
                      std::to_string(data.num_features()));
    }
    return model;
  }
  if (data.num_rows() == 0) throw DataError("cannot train a model on an empty dataset");
  if (cfg.model.kind == "linear") return fit_linear_model(data.x, data.y);
  return train_boosted_trees(data.x, data.y, cfg.model.boosting);
}

std::unique_ptr<CoalitionalGame> build_game(const ExperimentConfig& cfg, const Model& model, const Dataset& data,
                                            std::span<const double> x_e, const BaselineSet& baselines) {
  if (cfg.strategy == "baseline") return baseline_game(model, x_e, baselines.row(0));
  if (cfg.strategy == "marginal") return marginal_game(model, x_e, baselines);
  if (cfg.strategy == "uniform") return uniform_game(model, x_e, baselines, cfg.seed, cfg.n_draws);
  if (cfg.strategy == "product_marginals") return product_marginals_game(model, x_e, baselines, cfg.seed, cfg.n_draws);
  if (cfg.strategy == "conditional_gaussian") {
    return conditional_gaussian_game(model, x_e, fit_gaussian(data.x), cfg.seed, cfg.n_draws);
  }
  throw ConfigError("unknown removal strategy '" + cfg.strategy + "'");
}

Problem prepare_problem(const ExperimentConfig& cfg) {
  cfg.validate();
  Problem p;
  Dataset raw = cfg.dataset_path.empty() ? synthetic_dataset(cfg.synthetic) : load_dataset(cfg.dataset_path, cfg.target);
  p.data = with_dummy_features(raw, cfg.dummies);
  const std::size_t n = p.data.num_rows();
  if (cfg.explicand_row >= n) {
    throw DataError("explicand row " + std::to_string(cfg.explicand_row) + " out of range for " + std::to_string(n) +
                    " rows");
  }
  p.model = build_model(cfg, p.data);
  const auto row = p.data.x.row(cfg.explicand_row);
  p.x_e.assign(row.begin(), row.end());

  DataMatrix base;
  if (cfg.baseline_rows.empty()) {
    for (std::size_t r = 0; r < n; ++r) {
      if (r != cfg.explicand_row) base.push_row(p.data.x.row(r));
    }
  } else {
    for (std::size_t r : cfg.baseline_rows) {
      if (r >= n) throw DataError("baseline row " + std::to_string(r) + " out of range for " + std::to_string(n) + " rows");
      base.push_row(p.data.x.row(r));
    }
  }
  p.baselines = std::make_unique<BaselineSet>(std::move(base));
  std::unique_ptr<CoalitionalGame> game = build_game(cfg, p.model, p.data, p.x_e, *p.baselines);

  const std::size_t d = p.data.num_features();
  const bool interventional = cfg.strategy == "baseline" || cfg.strategy == "marginal";
  if (interventional && std::holds_alternative<TreeEnsemble>(p.model)) {
    p.truth = interventional_tree_shap(std::get<TreeEnsemble>(p.model), p.x_e, *p.baselines);
    p.truth_method = "interventional_tree_shap";
  } else if (interventional) {
    LinearModel lin = std::get<LinearModel>(p.model);
    lin.beta.resize(d, 0.0);
    p.truth = linear_shap(lin, p.x_e, *p.baselines);
    p.truth_method = "linear_shap";
  } else if (d <= TabulatedGame::kMaxPlayers) {
    p.truth = brute_force_shapley(*game);
    p.truth_method = "brute_force";
  } else {
    throw ConfigError("no exact reference for strategy '" + cfg.strategy + "' with d=" + std::to_string(d));
  }
  if (d <= kTabulateMaxPlayers) {
    p.game = TabulatedGame::from(*game);
  } else {
    p.game = std::move(game);
  }
  return p;
}

std::optional<AttributionVector> run_estimator(const EstimatorSpec& spec, const Problem& problem, std::uint64_t budget,
                                               std::uint64_t seed) {
  const CoalitionalGame& game = *problem.game;
  const std::size_t d = game.num_players();
  AttributionVector out;
  if (spec.is_exact()) {
    if (spec.name == "brute_force") {
      out = brute_force_shapley(game);
    } else if (spec.name == "linear_shap") {
      if (!std::holds_alternative<LinearModel>(problem.model)) throw ConfigError("linear_shap needs a linear model");
      LinearModel lin = std::get<LinearModel>(problem.model);
      lin.beta.resize(d, 0.0);
      out = linear_shap(lin, problem.x_e, *problem.baselines);
    } else {
      if (!std::holds_alternative<TreeEnsemble>(problem.model)) throw ConfigError(spec.name + " needs a tree ensemble");
      const auto& trees = std::get<TreeEnsemble>(problem.model);
      out = spec.name == "interventional_tree_shap" ? interventional_tree_shap(trees, problem.x_e, *problem.baselines)
                                                    : path_dependent_tree_shap(trees, problem.x_e);
    }
  } else {
    const Budget b = Budget::single(budget);
    EstimateTrace trace;
    try {
      if (spec.name == "semivalue") {
        // One independent per-player run each, budget split evenly.
        const std::uint64_t share = budget / d;
        out.phi.assign(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
          const EstimateTrace t = sample_semivalue(game, i, Budget::single(share), mix_key({seed, i}));
          const Snapshot* snap = t.at(share);
          if (share == 0 || snap == nullptr) return std::nullopt;
          out.phi[i] = snap->estimate.phi[i];
          out.evals_used += t.evals_used;
        }
        return out;
      }
      if (spec.name == "appro_shapley") {
        trace = appro_shapley(game, b, seed, spec.antithetic);
      } else if (spec.name == "ime") {
        trace = ime(game, b, seed, ImeOptions{spec.antithetic, spec.adaptive, spec.pilot});
      } else if (spec.name == "kernel_shap") {
        trace = kernel_shap(game, b, seed, spec.paired);
      } else if (spec.name == "sgd_shapley") {
        trace = sgd_shapley(game, b, seed, SgdOptions{spec.sgd_c, spec.sgd_t0});
      } else if (spec.name == "multilinear") {
        MultilinearOptions opt;
        opt.sampling = spec.sampling == "random" ? QSampling::kRandom : QSampling::kTrapezoid;
        opt.feature_wise = spec.feature_wise;
        opt.antithetic = spec.antithetic;
        opt.adaptive = spec.adaptive;
        opt.q_nodes = spec.q_nodes;
        opt.pilot = spec.pilot;
        trace = multilinear(game, b, seed, opt);
      } else {
        throw ConfigError("unknown estimator '" + spec.name + "'");
      }
    } catch (const BudgetError&) {
      return std::nullopt;
    }
    const Snapshot* snap = trace.at(budget);
    if (snap == nullptr) return std::nullopt;
    out = snap->estimate;
  }
  if (spec.normalize) out = additive_efficient_normalization(out);
  return out;
}

ErrorDecomposition decompose(const std::vector<std::optional<std::vector<double>>>& trials,
                             const std::vector<double>& truth, std::size_t n_features) {
  ErrorDecomposition e;
  std::vector<const std::vector<double>*> present;
  for (const auto& t : trials) {
    if (t) {
      present.push_back(&*t);
    } else {
      ++e.n_missing;
    }
  }
  e.n_trials = present.size();
  if (present.empty() || n_features == 0) {
    e.mse = e.bias_sq = e.variance = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  const double nt = static_cast<double>(present.size());
  for (std::size_t i = 0; i < n_features; ++i) {
    double mean = 0.0;
    for (const auto* t : present) mean += (*t)[i];
    mean /= nt;
    double var = 0.0;
    double sq = 0.0;
    for (const auto* t : present) {
      var += ((*t)[i] - mean) * ((*t)[i] - mean);
      sq += ((*t)[i] - truth[i]) * ((*t)[i] - truth[i]);
    }
    e.bias_sq += (mean - truth[i]) * (mean - truth[i]);
    e.variance += var / nt;
    e.mse += sq / nt;
  }
  const double nf = static_cast<double>(n_features);
  e.bias_sq /= nf;
  e.variance /= nf;
  e.mse /= nf;
  return e;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t estimator, std::uint64_t budget, std::size_t trial) {
  return mix_key({master, estimator, budget, trial});
}

Report run_experiment(const ExperimentConfig& cfg, std::size_t jobs) {
  const Problem problem = prepare_problem(cfg);
  Report report;
  report.config = cfg;
  report.feature_names = problem.data.feature_names;
  report.truth = problem.truth;
  report.truth_method = problem.truth_method;
  for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
    for (std::uint64_t budget : cfg.budgets) {
      Cell cell;
      cell.estimator = e;
      cell.budget = budget;
      cell.trials.resize(cfg.estimators[e].is_exact() ? 1 : cfg.n_trials);
      report.cells.push_back(std::move(cell));
    }
  }
  struct Task {
    std::size_t cell;
    std::size_t trial;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    for (std::size_t t = 0; t < report.cells[c].trials.size(); ++t) tasks.push_back({c, t});
  }
  parallel_for(tasks.size(), jobs, [&](std::size_t k) {
    Cell& cell = report.cells[tasks[k].cell];
    const EstimatorSpec& spec = cfg.estimators[cell.estimator];
    const std::uint64_t seed = trial_seed(cfg.seed, cell.estimator, cell.budget, tasks[k].trial);
    std::optional<AttributionVector> est = run_estimator(spec, problem, cell.budget, seed);
    if (est) cell.trials[tasks[k].trial] = std::move(est->phi);
  });
  for (Cell& cell : report.cells) cell.error = decompose(cell.trials, report.truth.phi, report.truth.phi.size());
  return report;
}

std::string preamble(const ExperimentConfig& cfg) {
  return "# config_hash=" + config_hash(cfg) + " seed=" + std::to_string(cfg.seed) + "\n# config=" +
         config_to_json(cfg) + "\n";
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

void write_report(const Report& report, const std::filesystem::path& dir) {
  prepare_dir(dir);
  const ExperimentConfig& cfg = report.config;
  const std::string head = preamble(cfg);

  std::string summary = head + "estimator,variant,budget,mse,bias_sq,variance,n_trials,n_missing\n";
  std::string trials = head + "estimator,variant,budget,trial";
  for (std::size_t i = 0; i < report.feature_names.size(); ++i) trials += ",phi_" + std::to_string(i);
  trials += "\n";
  for (const Cell& cell : report.cells) {
    const EstimatorSpec& spec = cfg.estimators[cell.estimator];
    const std::string key = spec.name + "," + spec.variant() + "," + std::to_string(cell.budget);
    const ErrorDecomposition& e = cell.error;
    summary += key + "," + fmt(e.mse) + "," + fmt(e.bias_sq) + "," + fmt(e.variance) + "," +
               std::to_string(e.n_trials) + "," + std::to_string(e.n_missing) + "\n";
    for (std::size_t t = 0; t < cell.trials.size(); ++t) {
      if (!cell.trials[t]) continue;
      trials += key + "," + std::to_string(t);
      for (double v : *cell.trials[t]) trials += "," + fmt(v);
      trials += "\n";
    }
  }
  std::string truth = head + "# method=" + report.truth_method + " v_empty=" + fmt(report.truth.v_empty) +
                      " v_full=" + fmt(report.truth.v_full) + "\nfeature_index,feature_name,phi\n";
  for (std::size_t i = 0; i < report.truth.phi.size(); ++i) {
    truth += std::to_string(i) + "," + report.feature_names[i] + "," + fmt(report.truth.phi[i]) + "\n";
  }
  write_file(dir / "summary.csv", summary);
  write_file(dir / "trials.csv", trials);
  write_file(dir / "truth.csv", truth);
  write_file(dir / "config.json", config_to_json(cfg) + "\n");
}

StressResult dummy_feature_stress(const ExperimentConfig& cfg, std::size_t n_dummies, std::size_t jobs) {
  StressResult result;
  result.base = run_experiment(cfg, jobs);
  ExperimentConfig stressed = cfg;
  stressed.dummies = cfg.dummies + n_dummies;
  result.stressed = n_dummies == 0 ? result.base : run_experiment(stressed, jobs);
  const std::size_t d = result.base.truth.phi.size();
  for (std::size_t c = 0; c < result.base.cells.size(); ++c) {
    const Cell& a = result.base.cells[c];
    const Cell& b = result.stressed.cells[c];
    DegradationRow row;
    row.estimator = cfg.estimators[a.estimator].name;
    row.variant = cfg.estimators[a.estimator].variant();
    row.budget = a.budget;
    row.mse_base = decompose(a.trials, result.base.truth.phi, d).mse;
    std::vector<double> truth(result.stressed.truth.phi.begin(), result.stressed.truth.phi.begin() + d);
    row.mse_dummies = decompose(b.trials, truth, d).mse;
    row.ratio = row.mse_base > 0.0 ? row.mse_dummies / row.mse_base : std::numeric_limits<double>::quiet_NaN();
    result.degradation.push_back(row);
  }
  return result;
}

void write_stress(const StressResult& result, const std::filesystem::path& dir) {
  write_report(result.base, dir / "base");
  write_report(result.stressed, dir / "dummies");
  std::string text = preamble(result.stressed.config) + "estimator,variant,budget,mse_base,mse_dummies,ratio\n";
  for (const DegradationRow& r : result.degradation) {
    text += r.estimator + "," + r.variant + "," + std::to_string(r.budget) + "," + fmt(r.mse_base) + "," +
            fmt(r.mse_dummies) + "," + fmt(r.ratio) + "\n";
  }
  write_file(dir / "degradation.csv", text);
}

}  // namespace shapley::bench
