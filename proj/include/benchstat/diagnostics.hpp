#pragma once

// Convergence diagnostics over per-chain sequences and the chi-square
// posterior predictive check.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "benchstat/banova.hpp"
#include "benchstat/data.hpp"

namespace benchstat
{

using ChainSet = std::vector<std::vector<double>>;

struct PsrfOptions
{
  /// Multiply by (d+3)/(d+1), d the moment estimate of the degrees of
  /// freedom of the pooled variance.
  bool df_correction = false;
  /// Split every chain in half before computing.
  bool split_chains = false;
};

struct PsrfResult
{
  std::optional<double> point;     ///< absent when the within-chain variance is zero
  std::optional<double> upper_ci;  ///< not computed by this estimator
};

/// Potential scale reduction: sqrt(((n-1)/n W + B/n) / W).
PsrfResult psrf(const ChainSet& chains, const PsrfOptions& opts = {});

/// Autocorrelation-based ESS with Geyer's initial positive sequence
/// truncation, computed per chain and summed. Absent for constant chains.
std::optional<double> effective_sample_size(const ChainSet& chains);

struct ParameterDiagnostic
{
  std::string name;
  std::optional<double> rhat;
  std::optional<double> ess;
};

/// One row per monitored column of the draws (all columns).
std::vector<ParameterDiagnostic> diagnose(const PosteriorDraws& p, const PsrfOptions& opts = {});

struct PpcResult
{
  double p_value = 0.0;
  std::vector<double> t_real;  ///< T(y; theta) per sampled draw
  std::vector<double> t_rep;   ///< T(y_rep; theta) per sampled draw
  double negative_fraction = 0.0;  ///< share of replicate cells below zero
};

/// Chi-square discrepancy check over `n_draws` draws sampled without
/// replacement. Replicates are not clamped. Normal variant only.
PpcResult posterior_predictive_check(const PosteriorDraws& p, const AggregatedMatrix& data,
                                     std::size_t n_draws, std::uint64_t seed);

}  // namespace benchstat
