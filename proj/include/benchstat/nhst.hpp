#pragma once

// Friedman omnibus test and Nemenyi all-pairs post-hoc on per-dataset ranks.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "benchstat/data.hpp"
#include "benchstat/pairwise.hpp"
#include "benchstat/ranks.hpp"

namespace benchstat
{

struct FriedmanResult
{
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  std::size_t n_subjects = 0;
  std::size_t k_treatments = 0;
};

/// Mean rank of every algorithm over a complete rank matrix.
std::vector<double> mean_ranks(const RankMatrix& r);

/// Requires a complete rank matrix with N >= 2 datasets and k >= 2 algorithms.
FriedmanResult friedman_test(const RankMatrix& r);

/// Exact pairwise p-values: the mean-rank gap divided by
/// sqrt(k(k+1)/(6N)) and scaled by sqrt(2) is read on the infinite-dof
/// studentized range with k groups. Values are clipped to [0, 1].
PairwiseMatrix nemenyi_pairwise(const RankMatrix& r);

/// p-value of a single pair given its mean-rank gap.
double nemenyi_p_value(double mean_rank_gap, std::size_t k, std::size_t n);

struct DemsarResult
{
  RankScheme scheme = RankScheme::average;
  FriedmanResult friedman;
  std::vector<std::string> algorithms;
  std::vector<double> mean_ranks;             ///< aligned with `algorithms`
  std::optional<PairwiseMatrix> nemenyi;      ///< absent when Friedman p >= alpha
  std::vector<std::string> dropped_datasets;  ///< incomplete rows removed before ranking
  std::vector<std::string> warnings;
};

/// Complete-case filter, ranking, Friedman, then Nemenyi when p < alpha.
DemsarResult demsar_procedure(const ScoreMatrix& m, RankScheme scheme, double alpha = 0.05);

}  // namespace benchstat
