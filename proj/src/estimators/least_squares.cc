#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "internal.hpp"

namespace shapley {

using internal::Meter;
using internal::Recorder;

std::vector<double> kernel_size_distribution(std::size_t d) {
  std::vector<double> p(d + 1, 0.0);
  if (d < 2) return p;
  double total = 0.0;
  for (std::size_t s = 1; s < d; ++s) {
    p[s] = static_cast<double>(d - 1) / (static_cast<double>(s) * static_cast<double>(d - s));
    total += p[s];
  }
  for (double& x : p) x /= total;
  return p;
}

WlsSystem::WlsSystem(std::size_t d, double v_empty, double v_full)
    : d_(d), v_empty_(v_empty), v_full_(v_full), normal_((d - 1) * (d - 1), 0.0), rhs_(d - 1, 0.0) {
  if (d < 2) throw std::invalid_argument("WlsSystem needs at least two players");
}

void WlsSystem::add(const Coalition& s, double weight, double value, std::uint64_t unit) {
  if (s.num_players() != d_) throw std::invalid_argument("coalition size does not match the system");
  const std::size_t size = s.size();
  if (size == 0 || size == d_) throw std::invalid_argument("WlsSystem rows must be interior coalitions");
  const std::size_t m = d_ - 1;
  const double z_last = s.contains(m) ? 1.0 : 0.0;
  std::vector<double> x(m);
  for (std::size_t j = 0; j < m; ++j) x[j] = (s.contains(j) ? 1.0 : 0.0) - z_last;
  const double t = value - v_empty_ - z_last * (v_full_ - v_empty_);
  for (std::size_t a = 0; a < m; ++a) {
    if (x[a] == 0.0) continue;
    for (std::size_t b = 0; b < m; ++b) normal_[a * m + b] += weight * x[a] * x[b];
    rhs_[a] += weight * x[a] * t;
  }
  coalitions_.push_back(s);
  weights_.push_back(weight);
  values_.push_back(value);
  units_.push_back(unit);
}

namespace {

Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> factor(const std::vector<double>& normal, std::size_t m) {
  Eigen::MatrixXd a(m, m);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c) a(r, c) = normal[r * m + c];
  return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(a);
}

}  // namespace

WlsSolution WlsSystem::solve() const {
  const std::size_t m = d_ - 1;
  const auto cod = factor(normal_, m);
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(rhs_.data(), static_cast<Eigen::Index>(m));
  const Eigen::VectorXd theta = cod.solve(rhs);
  WlsSolution out;
  out.rank_deficient = cod.rank() < static_cast<Eigen::Index>(m);
  out.beta.resize(d_);
  double sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    out.beta[j] = theta(static_cast<Eigen::Index>(j));
    sum += out.beta[j];
  }
  out.beta[m] = (v_full_ - v_empty_) - sum;
  return out;
}

std::pair<std::vector<double>, std::uint64_t> WlsSystem::unit_variance(const WlsSolution& solution) const {
  const std::size_t m = d_ - 1;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t n_units = 0;
  for (std::size_t r = 0; r < units_.size(); ++r) {
    if (r == 0 || units_[r] != units_[r - 1]) ++n_units;
  }
  if (n_units < 2) return {std::vector<double>(d_, nan), n_units};

  const auto cod = factor(normal_, m);
  Eigen::VectorXd theta(m);
  for (std::size_t j = 0; j < m; ++j) theta(static_cast<Eigen::Index>(j)) = solution.beta[j];

  std::vector<internal::RunningStats> stats(d_);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd x(m);
  auto flush = [&] {
    const Eigen::VectorXd psi = static_cast<double>(n_units) * cod.solve(g);
    stats[m].add(-psi.sum());
    for (std::size_t j = 0; j < m; ++j) stats[j].add(psi(static_cast<Eigen::Index>(j)));
    g.setZero();
  };
  for (std::size_t r = 0; r < coalitions_.size(); ++r) {
    if (r > 0 && units_[r] != units_[r - 1]) flush();
    const Coalition& s = coalitions_[r];
    const double z_last = s.contains(m) ? 1.0 : 0.0;
    for (std::size_t j = 0; j < m; ++j) x(static_cast<Eigen::Index>(j)) = (s.contains(j) ? 1.0 : 0.0) - z_last;
    const double t = values_[r] - v_empty_ - z_last * (v_full_ - v_empty_);
    const double e = t - x.dot(theta);
    g += weights_[r] * e * x;
  }
  flush();
  std::vector<double> var(d_);
  for (std::size_t i = 0; i < d_; ++i) var[i] = stats[i].variance();
  return {var, n_units};
}

namespace {

std::size_t draw_size(const std::vector<double>& cdf, CounterRng& rng) {
  const double u = rng.uniform();
  for (std::size_t s = 1; s + 1 < cdf.size(); ++s) {
    if (u < cdf[s]) return s;
  }
  return cdf.size() - 2;
}

// Uniform coalition of the given size by a partial Fisher-Yates pass over `pool`.
Coalition draw_coalition(std::size_t d, std::size_t size, std::vector<std::size_t>& pool, CounterRng& rng) {
  Coalition s(d);
  for (std::size_t j = 0; j < size; ++j) {
    const std::size_t k = j + static_cast<std::size_t>(rng.below(d - j));
    std::swap(pool[j], pool[k]);
    s.insert(pool[j]);
  }
  return s;
}

struct SizeSampler {
  explicit SizeSampler(std::size_t d) : d(d), pool(d) {
    const std::vector<double> p = kernel_size_distribution(d);
    cdf.resize(d + 1, 0.0);
    double acc = 0.0;
    for (std::size_t s = 0; s <= d; ++s) {
      acc += p[s];
      cdf[s] = acc;
    }
    std::iota(pool.begin(), pool.end(), 0);
  }
  Coalition operator()(CounterRng& rng) { return draw_coalition(d, draw_size(cdf, rng), pool, rng); }

  std::size_t d;
  std::vector<double> cdf;
  std::vector<std::size_t> pool;
};

}  // namespace

EstimateTrace kernel_shap(const CoalitionalGame& game, const Budget& budget, std::uint64_t seed, bool paired) {
  const std::size_t d = game.num_players();
  EstimateTrace trace;
  Recorder recorder(budget, trace);
  Meter meter(game, budget.max_evals);

  if (d == 1) {
    if (budget.max_evals < 2) throw BudgetError("kernel_shap needs at least 2 evaluations for d=1");
    const double v_empty = meter(Coalition::empty(1));
    const double v_full = meter(Coalition::full(1));
    auto make = [&] {
      Snapshot snap;
      snap.estimate.phi = {v_full - v_empty};
      snap.estimate.v_empty = v_empty;
      snap.estimate.v_full = v_full;
      snap.estimate.evals_used = meter.used();
      snap.variance = {0.0};
      snap.counts = {1};
      return snap;
    };
    recorder.offer(meter.used(), true, make);
    recorder.finish(meter.used(), true, make);
    return trace;
  }
  if (budget.max_evals < d + 2) {
    throw BudgetError("kernel_shap needs at least " + std::to_string(d + 2) + " evaluations for d=" +
                      std::to_string(d) + ", got " + std::to_string(budget.max_evals));
  }

  CounterRng rng = internal::make_rng(seed, internal::StreamId::kKernelShap, paired ? 1 : 0);
  const double v_empty = meter(Coalition::empty(d));
  const double v_full = meter(Coalition::full(d));
  WlsSystem system(d, v_empty, v_full);
  SizeSampler sampler(d);
  const Coalition everyone = Coalition::full(d);
  const std::uint64_t unit_cost = paired ? 2 : 1;
  bool warned = false;

  auto make = [&] {
    const WlsSolution sol = system.solve();
    if (sol.rank_deficient && !warned) {
      trace.warnings.push_back("kernel_shap: rank-deficient system at " + std::to_string(meter.used()) +
                               " evaluations, using the least-norm solution");
      warned = true;
    }
    auto [var, units] = system.unit_variance(sol);
    Snapshot snap;
    snap.estimate.phi = sol.beta;
    snap.estimate.v_empty = v_empty;
    snap.estimate.v_full = v_full;
    snap.estimate.evals_used = meter.used();
    snap.variance = std::move(var);
    snap.counts.assign(d, units);
    return snap;
  };

  for (std::uint64_t unit = 0; meter.affords(unit_cost); ++unit) {
    const Coalition s = sampler(rng);
    system.add(s, 1.0, meter(s), unit);
    if (paired) {
      const Coalition c = everyone - s;
      system.add(c, 1.0, meter(c), unit);
    }
    recorder.offer(meter.used(), system.rows() >= d, make);
  }
  recorder.finish(meter.used(), system.rows() >= d, make);
  return trace;
}

EstimateTrace sgd_shapley(const CoalitionalGame& game, const Budget& budget, std::uint64_t seed,
                          const SgdOptions& options) {
  const std::size_t d = game.num_players();
  if (budget.max_evals < 2) {
    throw BudgetError("sgd_shapley needs at least 2 evaluations, got " + std::to_string(budget.max_evals));
  }
  if (!(options.c > 0.0) || !(options.t0 > 0.0)) throw ConfigError("sgd_shapley step constants must be positive");

  EstimateTrace trace;
  Recorder recorder(budget, trace);
  Meter meter(game, budget.max_evals);
  CounterRng rng = internal::make_rng(seed, internal::StreamId::kSgdShapley);
  const double v_empty = meter(Coalition::empty(d));
  const double v_full = meter(Coalition::full(d));
  const double total = v_full - v_empty;
  std::vector<double> beta(d, total / static_cast<double>(d));
  std::uint64_t steps = 0;

  auto make = [&] {
    Snapshot snap;
    snap.estimate.phi = beta;
    snap.estimate.v_empty = v_empty;
    snap.estimate.v_full = v_full;
    snap.estimate.evals_used = meter.used();
    snap.variance.assign(d, std::numeric_limits<double>::quiet_NaN());
    snap.counts.assign(d, steps);
    return snap;
  };
  recorder.offer(meter.used(), true, make);
  if (d >= 2) {
    SizeSampler sampler(d);
    while (meter.affords(1)) {
      const Coalition s = sampler(rng);
      const double target = meter(s);
      double pred = v_empty;
      for (std::size_t i = 0; i < d; ++i) {
        if (s.contains(i)) pred += beta[i];
      }
      const double eta = options.c / (static_cast<double>(steps) + options.t0);
      const double r = pred - target;
      for (std::size_t i = 0; i < d; ++i) {
        if (s.contains(i)) beta[i] -= eta * r;
      }
      double sum = 0.0;
      for (double b : beta) sum += b;
      const double shift = (total - sum) / static_cast<double>(d);
      for (double& b : beta) b += shift;
      ++steps;
      recorder.offer(meter.used(), true, make);
    }
  }
  recorder.finish(meter.used(), true, make);
  return trace;
}

}  // namespace shapley
