#include "shapley/gaussian.hpp"

#include <cmath>
#include <string>

#include "shapley/errors.hpp"
#include "shapley/random.hpp"

namespace shapley {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double diagonal_scale(const MatrixXd& m) {
  return m.size() == 0 ? 1.0 : std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
}

}  // namespace

MatrixXd psd_factor(const MatrixXd& sigma) {
  const Index d = sigma.rows();
  const double scale = diagonal_scale(sigma);
  for (double jitter : {0.0, 1e-10, 1e-9, 1e-8}) {
    MatrixXd a = sigma;
    a.diagonal().array() += jitter * scale;
    Eigen::LDLT<MatrixXd> ldlt(a);
    if (ldlt.info() != Eigen::Success) continue;
    VectorXd pivots = ldlt.vectorD();
    if (d > 0 && pivots.minCoeff() < -1e-12 * scale) continue;
    pivots = pivots.cwiseMax(0.0).cwiseSqrt();
    MatrixXd lower = ldlt.matrixL();
    MatrixXd factor = lower * pivots.asDiagonal();
    return ldlt.transpositionsP().transpose() * factor;
  }
  throw NumericalError("covariance matrix is not positive semi-definite after jitter 1e-8");
}

void GaussianDistribution::validate() const {
  if (sigma.rows() != mu.size() || sigma.cols() != mu.size()) {
    throw DataError("gaussian: sigma must be " + std::to_string(mu.size()) + "x" + std::to_string(mu.size()));
  }
  if (!mu.allFinite() || !sigma.allFinite()) throw DataError("gaussian: non-finite parameters");
  const double scale = diagonal_scale(sigma);
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DataError("gaussian: sigma is not symmetric");
  }
  psd_factor(sigma);
}

GaussianDistribution GaussianDistribution::correlated(std::size_t d,
                                                      std::span<const std::vector<std::size_t>> groups,
                                                      double rho) {
  GaussianDistribution dist{VectorXd::Zero(static_cast<Index>(d)), MatrixXd::Identity(static_cast<Index>(d), static_cast<Index>(d))};
  for (const auto& group : groups) {
    for (std::size_t a : group) {
      for (std::size_t b : group) {
        if (a != b) dist.sigma(static_cast<Index>(a), static_cast<Index>(b)) = rho;
      }
    }
  }
  return dist;
}

ConditionalGaussian condition(const GaussianDistribution& dist, const Coalition& present,
                              std::span<const double> x) {
  const std::size_t d = dist.dim();
  if (present.num_players() != d || x.size() < d) throw DataError("condition: dimension mismatch");
  const std::vector<std::size_t> p = present.members();
  ConditionalGaussian out;
  out.absent = present.complement().members();
  const auto& a = out.absent;
  const auto np = static_cast<Index>(p.size());
  const auto na = static_cast<Index>(a.size());

  out.mean.resize(na);
  for (Index k = 0; k < na; ++k) out.mean(k) = dist.mu(static_cast<Index>(a[static_cast<std::size_t>(k)]));
  out.cov.resize(na, na);
  for (Index r = 0; r < na; ++r) {
    for (Index c = 0; c < na; ++c) {
      out.cov(r, c) = dist.sigma(static_cast<Index>(a[static_cast<std::size_t>(r)]),
                                 static_cast<Index>(a[static_cast<std::size_t>(c)]));
    }
  }
  out.gain = MatrixXd::Zero(na, np);
  if (np == 0 || na == 0) return out;

  MatrixXd s_pp(np, np);
  MatrixXd s_pa(np, na);
  VectorXd delta(np);
  for (Index r = 0; r < np; ++r) {
    const auto pr = static_cast<Index>(p[static_cast<std::size_t>(r)]);
    for (Index c = 0; c < np; ++c) s_pp(r, c) = dist.sigma(pr, static_cast<Index>(p[static_cast<std::size_t>(c)]));
    for (Index c = 0; c < na; ++c) s_pa(r, c) = dist.sigma(pr, static_cast<Index>(a[static_cast<std::size_t>(c)]));
    delta(r) = x[static_cast<std::size_t>(pr)] - dist.mu(pr);
  }

  const double scale = diagonal_scale(s_pp);
  for (double jitter = 0.0; jitter <= 1e-6; jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0) {
    MatrixXd m = s_pp;
    m.diagonal().array() += jitter * scale;
    Eigen::LLT<MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) continue;
    const MatrixXd solved = llt.solve(s_pa);  // Sigma_PP^{-1} Sigma_PA
    if (!solved.allFinite()) continue;
    out.gain = solved.transpose();
    out.mean += out.gain * delta;
    out.cov -= out.gain * s_pa;
    out.cov = 0.5 * (out.cov + out.cov.transpose());
    return out;
  }
  throw NumericalError("conditioning on " + present.to_string() + " failed: Sigma_PP singular after jitter");
}

DataMatrix sample_gaussian(const GaussianDistribution& dist, std::size_t n, std::uint64_t seed) {
  dist.validate();
  const std::size_t d = dist.dim();
  const MatrixXd factor = psd_factor(dist.sigma);
  DataMatrix out(n, d);
  CounterRng rng(mix_key({seed, 0x6761757373ULL}));
  VectorXd z(static_cast<Index>(d));
  for (std::size_t r = 0; r < n; ++r) {
    for (Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
    const VectorXd draw = dist.mu + factor * z;
    for (std::size_t c = 0; c < d; ++c) out(r, c) = draw(static_cast<Index>(c));
  }
  return out;
}

}  // namespace shapley
