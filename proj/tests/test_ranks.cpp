#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "benchstat/error.hpp"
#include "benchstat/ranks.hpp"
#include "helpers.hpp"

using namespace benchstat;
using testutil::matrix_of;

namespace
{

std::vector<double> row_ranks(const RankMatrix& r, std::size_t d)
{
  std::vector<double> out;
  for (std::size_t a = 0; a < r.n_algorithms(); ++a) out.push_back(r.rank(d, a).value_or(-1.0));
  return out;
}

}  // namespace

TEST_CASE("rounding to thousandths is half-up")
{
  CHECK(round_to_thousandths(0.1004) == 100);
  CHECK(round_to_thousandths(0.1006) == 101);
  CHECK(round_to_thousandths(0.1005) == 101);
  CHECK(round_to_thousandths(0.0) == 0);
  CHECK(round_to_thousandths(1.0) == 1000);
}

TEST_CASE("dense ranks")
{
  CHECK(row_ranks(dense_ranks(matrix_of({{0.1000, 0.1004, 0.2000}})), 0) == std::vector<double>{1, 1, 2});
  CHECK(row_ranks(dense_ranks(matrix_of({{0.10, 0.20, 0.30}})), 0) == std::vector<double>{1, 2, 3});
  CHECK(row_ranks(dense_ranks(matrix_of({{0.1004, 0.1006}})), 0) == std::vector<double>{1, 2});
  CHECK(row_ranks(dense_ranks(matrix_of({{0.3, 0.1, 0.3, 0.2}})), 0) == std::vector<double>{3, 1, 3, 2});
}

TEST_CASE("average ranks")
{
  CHECK(row_ranks(average_ranks(matrix_of({{0.1, 0.1, 0.3}})), 0) == std::vector<double>{1.5, 1.5, 3});
  CHECK(row_ranks(average_ranks(matrix_of({{0.1, 0.2, 0.3}})), 0) == std::vector<double>{1, 2, 3});
  CHECK(row_ranks(average_ranks(matrix_of({{0.4, 0.4, 0.4, 0.4}})), 0) == std::vector<double>{2.5, 2.5, 2.5, 2.5});
  // exact equality only: no rounding
  CHECK(row_ranks(average_ranks(matrix_of({{0.1000, 0.1004}})), 0) == std::vector<double>{1, 2});
}

TEST_CASE("missing cells and sparse datasets")
{
  auto m = matrix_of({{0.1, 0.2, 0.3}, {0.5, 0.2, 0.1}});
  m.clear(0, 1);
  m.clear(1, 0);
  m.clear(1, 2);
  const auto r = dense_ranks(m);
  CHECK(row_ranks(r, 0) == std::vector<double>{1, -1, 2});
  CHECK_FALSE(r.rank(1, 1).has_value());
  CHECK(r.warnings.size() == 1);
  CHECK_FALSE(r.complete());
}

TEST_CASE("average ranks sum to k(k+1)/2 and dense ranks are contiguous")
{
  const auto m = matrix_of({{0.3, 0.1, 0.3, 0.2, 0.2}, {0.5, 0.5, 0.5, 0.1, 0.9}, {0.1, 0.2, 0.3, 0.4, 0.5}});
  const auto avg = average_ranks(m);
  const auto dense = dense_ranks(m);
  for (std::size_t d = 0; d < m.n_datasets(); ++d) {
    double sum = 0;
    for (double v : row_ranks(avg, d)) sum += v;
    CHECK(sum == doctest::Approx(15.0));
    auto ranks = row_ranks(dense, d);
    std::sort(ranks.begin(), ranks.end());
    CHECK(ranks.front() == 1.0);
    for (std::size_t i = 1; i < ranks.size(); ++i) CHECK(ranks[i] - ranks[i - 1] <= 1.0);
  }
}

TEST_CASE("ranks invariant under shifts on the rounding grid")
{
  const auto m = matrix_of({{0.101, 0.103, 0.101, 0.250}, {0.400, 0.300, 0.200, 0.100}});
  auto shifted = m;
  for (std::size_t d = 0; d < m.n_datasets(); ++d) {
    for (std::size_t a = 0; a < m.n_algorithms(); ++a) shifted.set(d, a, m.value(d, a) + 0.007);
  }
  for (const auto scheme : {RankScheme::dense, RankScheme::average}) {
    const auto r1 = rank_scores(m, scheme);
    const auto r2 = rank_scores(shifted, scheme);
    for (std::size_t d = 0; d < m.n_datasets(); ++d) CHECK(row_ranks(r1, d) == row_ranks(r2, d));
  }
}

TEST_CASE("mean rank summary")
{
  const auto one = mean_rank_summary(dense_ranks(matrix_of({{0.1, 0.2}})));
  REQUIRE(one.size() == 2);
  CHECK(one[0].algorithm == "a0");
  CHECK(one[0].mean_rank == 1.0);
  CHECK(one[0].top_count == 1);
  CHECK(one[1].mean_rank == 2.0);
  CHECK(one[1].top_count == 0);

  // dense ties at rank 1 on both datasets: both algorithms count as top twice
  const auto tied = mean_rank_summary(dense_ranks(matrix_of({{0.1, 0.1, 0.5}, {0.2, 0.2, 0.3}})));
  CHECK(tied[0].algorithm == "a0");  // tie in mean rank broken by name
  CHECK(tied[0].top_count == 2);
  CHECK(tied[1].algorithm == "a1");
  CHECK(tied[1].top_count == 2);
  CHECK(tied[2].mean_rank == 2.0);
}

TEST_CASE("rank histogram")
{
  const auto m = matrix_of({{0.1, 0.2, 0.3}, {0.1, 0.3, 0.2}, {0.1, 0.2, 0.2}});
  const auto r = dense_ranks(m);
  const auto h = rank_histogram(r);
  CHECK(h.max_rank == 3);
  REQUIRE(h.algorithms.front() == "a0");
  CHECK(h.counts[0] == std::vector<std::size_t>{3, 0, 0});
  for (const auto& row : h.counts) {
    std::size_t sum = 0;
    for (auto c : row) sum += c;
    CHECK(sum == 3);
  }
  CHECK_THROWS_AS(rank_histogram(average_ranks(m)), InputError);

  std::ostringstream csv;
  write_histogram_csv(csv, h);
  CHECK(csv.str().rfind("algorithm,rank,count\na0,1,3\n", 0) == 0);
  std::ostringstream svg1, svg2;
  write_histogram_svg(svg1, h);
  write_histogram_svg(svg2, h);
  CHECK(svg1.str() == svg2.str());
  CHECK(svg1.str().find("<svg") != std::string::npos);
}

TEST_CASE("zero-noise planted ordering gives a permutation-diagonal histogram")
{
  auto spec = testutil::planted_spec({0.03, 0.0, 0.09, 0.06}, 25, 0.0, 0.004);
  spec.cv_noise = 0.0;
  const auto m = aggregate_errors(generate_synthetic(spec, 3));
  const auto h = rank_histogram(dense_ranks(m));
  for (std::size_t a = 0; a < h.algorithms.size(); ++a) {
    std::size_t nonzero = 0;
    for (auto c : h.counts[a]) nonzero += c != 0;
    CHECK(nonzero == 1);
    CHECK(h.counts[a][a] == 25);  // histogram rows follow mean-rank order
  }
  CHECK(h.algorithms == std::vector<std::string>{"alg1", "alg0", "alg3", "alg2"});
}
