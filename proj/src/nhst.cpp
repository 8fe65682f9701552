#include "benchstat/nhst.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "benchstat/error.hpp"
#include "benchstat/special.hpp"

namespace benchstat
{

namespace
{

void check_design(const RankMatrix& r)
{
  if (!r.complete()) {
    throw InputError("rank test needs a complete matrix; drop incomplete datasets first");
  }
  if (r.n_datasets() < 2) throw InputError("rank test needs at least 2 datasets");
  if (r.n_algorithms() < 2) throw InputError("rank test needs at least 2 algorithms");
}

}  // namespace

std::vector<double> mean_ranks(const RankMatrix& r)
{
  std::vector<double> means(r.n_algorithms(), 0.0);
  for (std::size_t a = 0; a < r.n_algorithms(); ++a) {
    std::size_t n = 0;
    for (std::size_t d = 0; d < r.n_datasets(); ++d) {
      if (const auto rank = r.rank(d, a)) {
        means[a] += *rank;
        ++n;
      }
    }
    if (n > 0) means[a] /= static_cast<double>(n);
  }
  return means;
}

FriedmanResult friedman_test(const RankMatrix& r)
{
  check_design(r);
  const auto n = static_cast<double>(r.n_datasets());
  const auto k = static_cast<double>(r.n_algorithms());
  double sum_sq = 0.0;
  for (double m : mean_ranks(r)) sum_sq += m * m;

  FriedmanResult out;
  out.n_subjects = r.n_datasets();
  out.k_treatments = r.n_algorithms();
  out.dof = static_cast<int>(r.n_algorithms()) - 1;
  out.statistic = 12.0 * n / (k * (k + 1.0)) * (sum_sq - k * (k + 1.0) * (k + 1.0) / 4.0);
  // all-tied designs can land a few ulps below zero
  if (out.statistic < 0.0 && out.statistic > -1e-9) out.statistic = 0.0;
  out.p_value = chi_square_sf(std::max(out.statistic, 0.0), out.dof);
  return out;
}

double nemenyi_p_value(double mean_rank_gap, std::size_t k, std::size_t n)
{
  const auto kd = static_cast<double>(k);
  const double se = std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(n)));
  const double q = std::abs(mean_rank_gap) / se * std::numbers::sqrt2;
  return std::clamp(studentized_range_sf(q, static_cast<int>(k)), 0.0, 1.0);
}

PairwiseMatrix nemenyi_pairwise(const RankMatrix& r)
{
  check_design(r);
  const auto means = mean_ranks(r);
  PairwiseMatrix out(PairwiseKind::nemenyi_p, r.algorithms());
  for (std::size_t i = 0; i < means.size(); ++i) {
    for (std::size_t j = i + 1; j < means.size(); ++j) {
      out.set(i, j, nemenyi_p_value(means[i] - means[j], r.n_algorithms(), r.n_datasets()));
    }
  }
  return out;
}

DemsarResult demsar_procedure(const ScoreMatrix& m, RankScheme scheme, double alpha)
{
  DemsarResult out;
  out.scheme = scheme;
  const auto complete = complete_cases(m, &out.dropped_datasets);
  if (!out.dropped_datasets.empty()) {
    std::string msg = "dropped " + std::to_string(out.dropped_datasets.size()) +
                      " incomplete dataset(s):";
    for (const auto& d : out.dropped_datasets) msg += " " + d;
    out.warnings.push_back(std::move(msg));
  }
  const auto ranks = rank_scores(complete, scheme);
  out.algorithms = ranks.algorithms();
  out.mean_ranks = mean_ranks(ranks);
  out.friedman = friedman_test(ranks);
  if (out.friedman.p_value < alpha) out.nemenyi = nemenyi_pairwise(ranks);
  return out;
}

}  // namespace benchstat
