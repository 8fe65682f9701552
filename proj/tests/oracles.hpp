#pragma once

// Reference computations used as test oracles.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "benchstat/banova.hpp"
#include "benchstat/diagnostics.hpp"

namespace oracle
{

struct Gaussian
{
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Conditional posterior of (beta, alpha, delta) given fixed sigma0,
/// sigma_a, sigma_d, by dense linear algebra.
inline Gaussian location_posterior(const benchstat::ModelSpec& spec, const benchstat::AggregatedMatrix& m)
{
  const auto na = m.n_algorithms();
  const auto nd = m.n_datasets();
  const auto p = 1 + na + nd;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  q(0, 0) = 1.0 / (spec.beta_sd * spec.beta_sd);
  b(0) = spec.beta_mean * q(0, 0);
  for (std::size_t a = 0; a < na; ++a) q(1 + a, 1 + a) = 1.0 / (*spec.fixed_sigma_a * *spec.fixed_sigma_a);
  for (std::size_t d = 0; d < nd; ++d) q(1 + na + d, 1 + na + d) = 1.0 / (*spec.fixed_sigma_d * *spec.fixed_sigma_d);
  const double tau = 1.0 / (*spec.fixed_sigma0 * *spec.fixed_sigma0);
  for (std::size_t d = 0; d < nd; ++d) {
    for (std::size_t a = 0; a < na; ++a) {
      if (!m.present(d, a)) continue;
      Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
      x(0) = 1.0;
      x(1 + a) = 1.0;
      x(1 + na + d) = 1.0;
      q += tau * x * x.transpose();
      b += tau * m.value(d, a) * x;
    }
  }
  Gaussian g;
  g.cov = q.inverse();
  g.mean = g.cov * b;
  return g;
}

struct MomentCheck
{
  double mean = 0.0;
  double var = 0.0;
  double mean_se = 0.0;  ///< Monte Carlo standard error of the sample mean
  double var_se = 0.0;   ///< of the sample variance, via the ESS of the squared deviations
};

inline MomentCheck moments(const benchstat::ChainSet& chains)
{
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : chains) {
    for (double v : c) sum += v;
    n += c.size();
  }
  MomentCheck out;
  out.mean = sum / static_cast<double>(n);
  benchstat::ChainSet sq = chains;
  double ss = 0.0;
  for (auto& c : sq) {
    for (double& v : c) {
      v = (v - out.mean) * (v - out.mean);
      ss += v;
    }
  }
  out.var = ss / static_cast<double>(n - 1);
  const double ess = benchstat::effective_sample_size(chains).value_or(1.0);
  out.mean_se = std::sqrt(out.var / ess);
  double m4 = 0.0;
  for (const auto& c : sq) {
    for (double v : c) m4 += (v - out.var) * (v - out.var);
  }
  const double ess_sq = benchstat::effective_sample_size(sq).value_or(1.0);
  out.var_se = std::sqrt(m4 / static_cast<double>(n - 1) / ess_sq);
  return out;
}

}  // namespace oracle
