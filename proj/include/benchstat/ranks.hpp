#pragma once

// Per-dataset ranking of algorithms (lower score is better) and the summaries
// built on top of it.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "benchstat/data.hpp"

namespace benchstat
{

enum class RankScheme
{
  dense,    ///< scores rounded half-up to 3 decimals; ties share a rank; no gaps
  average   ///< exact ties receive the mean of the positions they span
};

class RankMatrix
{
public:
  RankMatrix(RankScheme scheme, std::vector<std::string> datasets,
             std::vector<std::string> algorithms);

  RankScheme scheme() const { return scheme_; }
  std::size_t n_datasets() const { return datasets_.size(); }
  std::size_t n_algorithms() const { return algorithms_.size(); }
  const std::vector<std::string>& datasets() const { return datasets_; }
  const std::vector<std::string>& algorithms() const { return algorithms_; }

  std::optional<double> rank(std::size_t d, std::size_t a) const;
  void set(std::size_t d, std::size_t a, double r);

  /// True when every algorithm has a rank on every dataset.
  bool complete() const;

  /// Datasets skipped because fewer than two algorithms were present.
  std::vector<std::string> warnings;

private:
  RankScheme scheme_;
  std::vector<std::string> datasets_;
  std::vector<std::string> algorithms_;
  std::vector<double> ranks_;
  std::vector<std::uint8_t> mask_;
};

/// Rounds half-up to 3 decimal places and returns the result in thousandths.
std::int64_t round_to_thousandths(double x);

RankMatrix dense_ranks(const ScoreMatrix& m);
RankMatrix average_ranks(const ScoreMatrix& m);
RankMatrix rank_scores(const ScoreMatrix& m, RankScheme scheme);

struct RankSummaryRow
{
  std::string algorithm;
  double mean_rank = 0.0;
  std::size_t top_count = 0;     ///< datasets where the algorithm has rank 1
  std::size_t n_datasets = 0;    ///< datasets where the algorithm was ranked
};

/// Sorted by mean rank, ties broken by algorithm name. Algorithms that were
/// never ranked are omitted.
std::vector<RankSummaryRow> mean_rank_summary(const RankMatrix& r);

struct RankHistogram
{
  std::vector<std::string> algorithms;
  /// counts[a][r-1] = number of datasets where algorithm a has rank r.
  std::vector<std::vector<std::size_t>> counts;
  std::size_t max_rank = 0;
};

/// Requires dense ranks; throws InputError for the average scheme.
RankHistogram rank_histogram(const RankMatrix& r);

/// `algorithm,rank,count` rows, one per (algorithm, rank) with rank 1..max.
void write_histogram_csv(std::ostream& out, const RankHistogram& h);

/// Standalone SVG heatmap; layout depends only on the histogram contents.
void write_histogram_svg(std::ostream& out, const RankHistogram& h);

}  // namespace benchstat
