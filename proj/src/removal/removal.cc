#include "shapley/removal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shapley/errors.hpp"
#include "shapley/random.hpp"

namespace shapley {
namespace {

void check_finite(std::span<const double> x, const char* what) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw DataError(std::string(what) + " has non-finite value at feature " + std::to_string(i));
  }
}

std::vector<double>& scratch(std::size_t d) {
  thread_local std::vector<double> buffer;
  buffer.resize(d);
  return buffer;
}

}  // namespace

BaselineSet::BaselineSet(DataMatrix rows) : rows_(std::move(rows)) {
  if (rows_.rows() == 0) throw DataError("baseline set needs at least one row");
  if (rows_.cols() == 0) throw DataError("baseline rows have no features");
  for (std::size_t r = 0; r < rows_.rows(); ++r) check_finite(rows_.row(r), "baseline row");
}

BaselineSet::BaselineSet(std::span<const double> row)
    : BaselineSet(DataMatrix(1, row.size(), std::vector<double>(row.begin(), row.end()))) {}

std::vector<double> BaselineSet::column_means() const {
  std::vector<double> mean(num_features(), 0.0);
  for (std::size_t r = 0; r < size(); ++r) {
    for (std::size_t c = 0; c < num_features(); ++c) mean[c] += rows_(r, c);
  }
  for (double& m : mean) m /= static_cast<double>(size());
  return mean;
}

std::vector<double> BaselineSet::column_min() const {
  std::vector<double> out(rows_.row(0).begin(), rows_.row(0).end());
  for (std::size_t r = 1; r < size(); ++r) {
    for (std::size_t c = 0; c < num_features(); ++c) out[c] = std::min(out[c], rows_(r, c));
  }
  return out;
}

std::vector<double> BaselineSet::column_max() const {
  std::vector<double> out(rows_.row(0).begin(), rows_.row(0).end());
  for (std::size_t r = 1; r < size(); ++r) {
    for (std::size_t c = 0; c < num_features(); ++c) out[c] = std::max(out[c], rows_(r, c));
  }
  return out;
}

void compose_into(std::span<const double> x_e, std::span<const double> x_b, const Coalition& s,
                  std::span<double> out) {
  if (x_e.size() != x_b.size() || out.size() != x_e.size() || s.num_players() != x_e.size()) {
    throw DataError("compose: length mismatch");
  }
  for (std::size_t i = 0; i < x_e.size(); ++i) out[i] = s.contains(i) ? x_e[i] : x_b[i];
}

std::vector<double> compose(std::span<const double> x_e, std::span<const double> x_b, const Coalition& s) {
  std::vector<double> out(x_e.size());
  compose_into(x_e, x_b, s, out);
  return out;
}

ModelGame::ModelGame(Model model, std::span<const double> x_e)
    : CoalitionalGame(x_e.size()), model_(std::move(model)), x_e_(x_e.begin(), x_e.end()) {
  check_finite(x_e_, "explicand");
  if (required_features(model_) > x_e_.size()) {
    throw DataError("model uses " + std::to_string(required_features(model_)) +
                    " features but explicand has " + std::to_string(x_e_.size()));
  }
}

double ModelGame::predict_composed(std::span<const double> background, const Coalition& s) const {
  auto& buffer = scratch(x_e_.size());
  compose_into(x_e_, background, s, buffer);
  return predict(model_, buffer);
}

BaselineGame::BaselineGame(Model model, std::span<const double> x_e, std::span<const double> x_b)
    : ModelGame(std::move(model), x_e), x_b_(x_b.begin(), x_b.end()) {
  if (x_b_.size() != x_e_.size()) throw DataError("baseline length != explicand length");
  check_finite(x_b_, "baseline");
}

double BaselineGame::value(const Coalition& s) const { return predict_composed(x_b_, s); }

MarginalGame::MarginalGame(Model model, std::span<const double> x_e, BaselineSet baselines)
    : ModelGame(std::move(model), x_e), baselines_(std::move(baselines)) {
  if (baselines_.num_features() != x_e_.size()) throw DataError("baseline width != explicand length");
}

double MarginalGame::value(const Coalition& s) const {
  double total = 0.0;
  for (std::size_t b = 0; b < baselines_.size(); ++b) total += predict_composed(baselines_.row(b), s);
  return total / static_cast<double>(baselines_.size());
}

UniformGame::UniformGame(Model model, std::span<const double> x_e, const BaselineSet& baselines,
                         std::uint64_t seed, std::size_t n_draws)
    : ModelGame(std::move(model), x_e),
      lo_(baselines.column_min()),
      hi_(baselines.column_max()),
      seed_(seed),
      n_draws_(n_draws) {
  if (baselines.num_features() != x_e_.size()) throw DataError("baseline width != explicand length");
  if (baselines.size() < 2) throw DataError("uniform removal needs at least two baseline rows");
  if (n_draws_ == 0) throw ConfigError("n_draws must be positive");
}

double UniformGame::value(const Coalition& s) const {
  const std::size_t d = x_e_.size();
  if (s.size() == d) return predict(model_, x_e_);
  CounterRng rng(mix_key({seed_, s.hash()}));
  std::vector<double> background(d);
  double total = 0.0;
  for (std::size_t k = 0; k < n_draws_; ++k) {
    for (std::size_t i = 0; i < d; ++i) background[i] = s.contains(i) ? x_e_[i] : rng.uniform(lo_[i], hi_[i]);
    total += predict(model_, background);
  }
  return total / static_cast<double>(n_draws_);
}

ProductMarginalsGame::ProductMarginalsGame(Model model, std::span<const double> x_e, BaselineSet baselines,
                                           std::uint64_t seed, std::size_t n_draws)
    : ModelGame(std::move(model), x_e), baselines_(std::move(baselines)), seed_(seed), n_draws_(n_draws) {
  if (baselines_.num_features() != x_e_.size()) throw DataError("baseline width != explicand length");
  if (n_draws_ == 0) throw ConfigError("n_draws must be positive");
}

double ProductMarginalsGame::value(const Coalition& s) const {
  const std::size_t d = x_e_.size();
  if (s.size() == d) return predict(model_, x_e_);
  if (baselines_.size() == 1) return predict_composed(baselines_.row(0), s);
  CounterRng rng(mix_key({seed_, s.hash()}));
  std::vector<double> background(d);
  double total = 0.0;
  for (std::size_t k = 0; k < n_draws_; ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      background[i] = s.contains(i) ? x_e_[i] : baselines_.rows()(rng.below(baselines_.size()), i);
    }
    total += predict(model_, background);
  }
  return total / static_cast<double>(n_draws_);
}

ConditionalGaussianGame::ConditionalGaussianGame(Model model, std::span<const double> x_e,
                                                 GaussianDistribution dist, std::uint64_t seed,
                                                 std::size_t n_draws, ConditionalMode mode)
    : ModelGame(std::move(model), x_e), dist_(std::move(dist)), seed_(seed), n_draws_(n_draws), mode_(mode) {
  dist_.validate();
  if (dist_.dim() != x_e_.size()) throw DataError("distribution dimension != explicand length");
  if (mode_ == ConditionalMode::kExact && !std::holds_alternative<LinearModel>(model_)) {
    throw ConfigError("exact conditional mode is only valid for linear models");
  }
  if (mode_ == ConditionalMode::kSample && n_draws_ == 0) throw ConfigError("n_draws must be positive");
}

double ConditionalGaussianGame::value(const Coalition& s) const {
  const std::size_t d = x_e_.size();
  if (s.size() == d) return predict(model_, x_e_);
  const ConditionalGaussian cond = condition(dist_, s, x_e_);
  std::vector<double> point(x_e_);
  if (mode_ == ConditionalMode::kExact) {
    for (std::size_t k = 0; k < cond.absent.size(); ++k) point[cond.absent[k]] = cond.mean(static_cast<Eigen::Index>(k));
    return predict(model_, point);
  }
  const Eigen::MatrixXd factor = psd_factor(cond.cov);
  CounterRng rng(mix_key({seed_, s.hash()}));
  Eigen::VectorXd z(static_cast<Eigen::Index>(cond.absent.size()));
  double total = 0.0;
  for (std::size_t k = 0; k < n_draws_; ++k) {
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.normal();
    const Eigen::VectorXd draw = cond.mean + factor * z;
    for (std::size_t j = 0; j < cond.absent.size(); ++j) point[cond.absent[j]] = draw(static_cast<Eigen::Index>(j));
    total += predict(model_, point);
  }
  return total / static_cast<double>(n_draws_);
}

EmpiricalConditionalGame::EmpiricalConditionalGame(Model model, std::span<const double> x_e, BaselineSet baselines)
    : ModelGame(std::move(model), x_e), baselines_(std::move(baselines)) {
  if (baselines_.num_features() != x_e_.size()) throw DataError("baseline width != explicand length");
}

double EmpiricalConditionalGame::value(const Coalition& s) const {
  const std::vector<std::size_t> present = s.members();
  double total = 0.0;
  std::size_t matched = 0;
  for (std::size_t b = 0; b < baselines_.size(); ++b) {
    const auto row = baselines_.row(b);
    const bool match = std::all_of(present.begin(), present.end(), [&](std::size_t i) { return row[i] == x_e_[i]; });
    if (!match) continue;
    total += predict_composed(row, s);
    ++matched;
  }
  if (matched == 0) {
    for (std::size_t b = 0; b < baselines_.size(); ++b) total += predict_composed(baselines_.row(b), s);
    matched = baselines_.size();
  }
  return total / static_cast<double>(matched);
}

std::unique_ptr<BaselineGame> baseline_game(const Model& model, std::span<const double> x_e,
                                            std::span<const double> x_b) {
  return std::make_unique<BaselineGame>(model, x_e, x_b);
}

std::unique_ptr<MarginalGame> marginal_game(const Model& model, std::span<const double> x_e,
                                            const BaselineSet& baselines) {
  return std::make_unique<MarginalGame>(model, x_e, baselines);
}

std::unique_ptr<UniformGame> uniform_game(const Model& model, std::span<const double> x_e,
                                          const BaselineSet& baselines, std::uint64_t seed, std::size_t n_draws) {
  return std::make_unique<UniformGame>(model, x_e, baselines, seed, n_draws);
}

std::unique_ptr<ProductMarginalsGame> product_marginals_game(const Model& model, std::span<const double> x_e,
                                                             const BaselineSet& baselines, std::uint64_t seed,
                                                             std::size_t n_draws) {
  return std::make_unique<ProductMarginalsGame>(model, x_e, baselines, seed, n_draws);
}

std::unique_ptr<ConditionalGaussianGame> conditional_gaussian_game(const Model& model, std::span<const double> x_e,
                                                                   const GaussianDistribution& dist,
                                                                   std::uint64_t seed, std::size_t n_draws,
                                                                   ConditionalMode mode) {
  return std::make_unique<ConditionalGaussianGame>(model, x_e, dist, seed, n_draws, mode);
}

}  // namespace shapley
