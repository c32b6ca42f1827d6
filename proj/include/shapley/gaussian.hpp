#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "shapley/coalition.hpp"
#include "shapley/matrix.hpp"

namespace shapley {

/// Multivariate normal N(mu, sigma).
struct GaussianDistribution {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;

  std::size_t dim() const { return static_cast<std::size_t>(mu.size()); }

  /// Throws DataError on shape/symmetry problems and NumericalError when sigma is not PSD
  /// even after jitter.
  void validate() const;

  /// Unit-variance distribution whose features are pairwise correlated by `rho` within each
  /// listed group of indices and independent otherwise.
  static GaussianDistribution correlated(std::size_t d, std::span<const std::vector<std::size_t>> groups,
                                         double rho);
};

/// Matrix F with F F^T = sigma (+ jitter), tolerating singular PSD input. Tries the pivoted
/// LDL^T factorisation with jitter 0, 1e-10, 1e-9, 1e-8 on the diagonal; throws
/// NumericalError when every attempt reports a negative pivot.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& sigma);

/// Parameters of x_absent | x_present = values, for the standard Gaussian conditioning
/// formulas. `absent` lists indices not in the coalition, in increasing order.
struct ConditionalGaussian {
  std::vector<std::size_t> absent;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  /// Regression matrix Sigma_AP Sigma_PP^{-1}; mean = mu_A + gain (x_P - mu_P).
  Eigen::MatrixXd gain;
};

/// Conditions `dist` on the coordinates in `present` taking the values x[present].
/// Sigma_PP is solved with a Cholesky factorisation, escalating diagonal jitter from 1e-10
/// when it is numerically singular.
ConditionalGaussian condition(const GaussianDistribution& dist, const Coalition& present,
                              std::span<const double> x);

/// n i.i.d. draws mu + F z, z ~ N(0, I), reproducible per seed.
DataMatrix sample_gaussian(const GaussianDistribution& dist, std::size_t n, std::uint64_t seed);

}  // namespace shapley
