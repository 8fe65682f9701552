#pragma once

// Empirical irrelevance threshold: how much an error rate moves between the
// two halves of a dataset, and between the inner CV estimate and the held-out
// error, for each dataset's best algorithms.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "benchstat/data.hpp"

namespace benchstat
{

using TopAlgorithms = std::map<std::string, std::set<std::string>>;

struct DeltaList
{
  std::vector<double> values;
  std::vector<std::string> warnings;
};

struct ThresholdReport
{
  double median_delta_resample = 0.0;
  std::optional<double> median_delta_cv;  ///< absent when no cv_error is available
  double threshold = 0.0;
  std::size_t n_pairs_used = 0;            ///< (dataset, algorithm) pairs behind the resample median
  std::size_t n_cv_records_used = 0;
  std::vector<std::string> warnings;
};

/// Per dataset, the algorithms with the k smallest aggregated errors; every
/// algorithm tied with the k-th value is included.
TopAlgorithms top_k_algorithms(const AggregatedMatrix& m, std::size_t k);

/// |test_error(subset 2) - test_error(subset 1)| for every top algorithm.
DeltaList resample_deltas(const ErrorTable& t, const TopAlgorithms& top);

/// |test_error - cv_error| for every record of a top algorithm (both halves).
DeltaList cv_deltas(const ErrorTable& t, const TopAlgorithms& top);

/// Even counts use the midpoint of the two central values. Throws on empty.
double median(std::vector<double> values);

/// Top-3 selection, both delta lists, their medians, and the minimum.
ThresholdReport irrelevance_threshold(const ErrorTable& t, std::size_t top_k = 3);

}  // namespace benchstat
