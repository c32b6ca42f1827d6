#include <bit>
#include <numeric>
#include <string>

#include "shapley/errors.hpp"
#include "shapley/exact.hpp"
#include "shapley/game_core.hpp"
#include "shapley/random.hpp"

namespace shapley {

namespace {

void check_length(std::size_t d, std::size_t got, const char* what) {
  if (got != d) {
    throw DataError(std::string(what) + " has " + std::to_string(got) + " features, model expects " +
                    std::to_string(d));
  }
}

// P_S: row i is e_i for present i and the regression row of x_i on x_S otherwise.
Eigen::MatrixXd projection(const GaussianDistribution& dist, const Coalition& present) {
  const auto d = static_cast<Eigen::Index>(dist.dim());
  const std::vector<double> zeros(dist.dim(), 0.0);
  const ConditionalGaussian cond = condition(dist, present, zeros);
  const std::vector<std::size_t> members = present.members();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i : members) p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
  for (std::size_t r = 0; r < cond.absent.size(); ++r) {
    for (std::size_t c = 0; c < members.size(); ++c) {
      p(static_cast<Eigen::Index>(cond.absent[r]), static_cast<Eigen::Index>(members[c])) =
          cond.gain(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return p;
}

}  // namespace

AttributionVector linear_shap(const LinearModel& model, std::span<const double> x_e, const BaselineSet& baselines) {
  const std::size_t d = model.num_features();
  check_length(d, x_e.size(), "explicand");
  check_length(d, baselines.num_features(), "baseline set");
  const std::vector<double> mu = baselines.column_means();
  AttributionVector out;
  out.phi.resize(d);
  for (std::size_t i = 0; i < d; ++i) out.phi[i] = model.beta[i] * (x_e[i] - mu[i]);
  out.v_empty = model.predict(mu);
  out.v_full = model.predict(x_e);
  return out;
}

CorrelatedLinearShap::CorrelatedLinearShap(LinearModel model, GaussianDistribution dist,
                                           CorrelatedLinearCoefficients coefficients)
    : model_(std::move(model)), dist_(std::move(dist)), coefficients_(std::move(coefficients)) {
  const std::size_t d = model_.num_features();
  const Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(model_.beta.data(), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    slope_.push_back(coefficients_.b[i].transpose() * beta);
    offset_.push_back(beta.dot(coefficients_.a[i] * dist_.mu));
  }
}

AttributionVector CorrelatedLinearShap::explain(std::span<const double> x_e) const {
  const std::size_t d = model_.num_features();
  check_length(d, x_e.size(), "explicand");
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x_e.data(), static_cast<Eigen::Index>(d));
  AttributionVector out;
  out.phi.resize(d);
  for (std::size_t i = 0; i < d; ++i) out.phi[i] = offset_[i] + slope_[i].dot(x);
  const std::vector<double> mu(dist_.mu.data(), dist_.mu.data() + d);
  out.v_empty = model_.predict(mu);
  out.v_full = model_.predict(x_e);
  return out;
}

CorrelatedLinearShap correlated_linear_shap(const LinearModel& model, const GaussianDistribution& dist,
                                            std::size_t n_coalitions, std::uint64_t seed) {
  const std::size_t d = model.num_features();
  dist.validate();
  check_length(d, dist.dim(), "distribution");
  const auto dd = static_cast<Eigen::Index>(d);

  CorrelatedLinearCoefficients coef;
  coef.b.assign(d, Eigen::MatrixXd::Zero(dd, dd));
  if (d <= kExhaustiveCorrelatedMax) {
    coef.exhaustive = true;
    const std::uint64_t n = std::uint64_t{1} << d;
    std::vector<Eigen::MatrixXd> maps(n);
    for (std::uint64_t mask = 0; mask < n; ++mask) maps[mask] = projection(dist, Coalition::from_mask(d, mask));
    coef.n_coalitions_sampled = n;
    for (std::uint64_t mask = 0; mask < n; ++mask) {
      const auto size = static_cast<std::size_t>(std::popcount(mask));
      if (size == d) continue;
      const double w = shapley_weight(size, d);
      for (std::size_t i = 0; i < d; ++i) {
        if (mask & (std::uint64_t{1} << i)) continue;
        coef.b[i] += w * (maps[mask | (std::uint64_t{1} << i)] - maps[mask]);
      }
    }
  } else {
    if (n_coalitions == 0) throw ConfigError("correlated_linear_shap needs n_coalitions > 0 when d > 12");
    CounterRng rng(mix_key({seed, 0x636c7368ULL}));
    std::vector<std::size_t> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    const double scale = 1.0 / static_cast<double>(n_coalitions);
    for (std::size_t t = 0; t < n_coalitions; ++t) {
      rng.shuffle(std::span<std::size_t>(perm));
      Coalition s(d);
      Eigen::MatrixXd prev = projection(dist, s);
      for (std::size_t p : perm) {
        s.insert(p);
        Eigen::MatrixXd cur = projection(dist, s);
        coef.b[p] += scale * (cur - prev);
        prev = std::move(cur);
      }
      coef.n_coalitions_sampled += d + 1;
    }
  }
  coef.a.reserve(d);
  for (std::size_t i = 0; i < d; ++i) coef.a.push_back(-coef.b[i]);
  return CorrelatedLinearShap(model, dist, std::move(coef));
}

}  // namespace shapley
