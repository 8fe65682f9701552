#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "benchstat/error.hpp"
#include "benchstat/nhst.hpp"
#include "benchstat/special.hpp"
#include "helpers.hpp"

using namespace benchstat;
using testutil::matrix_of;

TEST_CASE("Friedman: consistent ranking N=3 k=3")
{
  const auto m = matrix_of({{0.1, 0.2, 0.3}, {0.15, 0.25, 0.35}, {0.0, 0.5, 0.9}});
  const auto f = friedman_test(average_ranks(m));
  CHECK(f.statistic == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(std::abs(f.p_value - std::exp(-3.0)) < 1e-9);
  CHECK(f.dof == 2);
  CHECK(f.n_subjects == 3);
  CHECK(f.k_treatments == 3);
}

TEST_CASE("Friedman: all tied gives statistic 0 and p 1")
{
  const auto f = friedman_test(average_ranks(matrix_of({{0.2, 0.2, 0.2}, {0.3, 0.3, 0.3}})));
  CHECK(f.statistic == doctest::Approx(0.0));
  CHECK(f.p_value == doctest::Approx(1.0));
}

TEST_CASE("Friedman k=2 reduces to (wins_A - wins_B)^2 / N")
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<std::vector<double>> rows;
    int wins_a = 0;
    for (int d = 0; d < 10; ++d) {
      const double x = u(rng);
      const double y = u(rng);
      rows.push_back({x, y});
      wins_a += x < y;
    }
    const int wins_b = 10 - wins_a;
    const auto f = friedman_test(average_ranks(matrix_of(rows)));
    CHECK(f.statistic == doctest::Approx((wins_a - wins_b) * (wins_a - wins_b) / 10.0));
  }
}

TEST_CASE("Friedman is invariant to relabeling")
{
  const auto m = matrix_of({{0.1, 0.4, 0.3, 0.2}, {0.2, 0.1, 0.3, 0.4}, {0.3, 0.1, 0.2, 0.4}, {0.1, 0.2, 0.2, 0.5}});
  const auto base = friedman_test(average_ranks(m));
  // reverse the algorithm order and the dataset order
  std::vector<std::vector<double>> rows;
  for (std::size_t d = m.n_datasets(); d-- > 0;) {
    std::vector<double> row;
    for (std::size_t a = m.n_algorithms(); a-- > 0;) row.push_back(m.value(d, a));
    rows.push_back(row);
  }
  const auto perm = friedman_test(average_ranks(matrix_of(rows)));
  CHECK(perm.statistic == doctest::Approx(base.statistic).epsilon(1e-14));
  CHECK(perm.p_value == doctest::Approx(base.p_value).epsilon(1e-14));
}

TEST_CASE("Friedman preconditions")
{
  CHECK_THROWS_AS(friedman_test(average_ranks(matrix_of({{0.1, 0.2}}))), InputError);
  auto m = matrix_of({{0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}});
  m.clear(1, 1);
  CHECK_THROWS_AS(friedman_test(average_ranks(m)), InputError);
}

TEST_CASE("Nemenyi: equal mean ranks give p = 1")
{
  CHECK(nemenyi_p_value(0.0, 5, 20) == doctest::Approx(1.0));
}

TEST_CASE("Nemenyi k=2 closed form")
{
  // k=2: SE = 1/sqrt(N), so p = 2(1 - Phi(gap sqrt(N))), the sign-test normal approximation.
  const double p = nemenyi_p_value(0.2, 2, 100);
  CHECK(std::abs(p - 2.0 * (1.0 - normal_cdf(0.2 * 10.0))) < 1e-6);
}

TEST_CASE("Nemenyi p-values are monotone in the gap")
{
  double prev = 1.0;
  for (double gap = 0.0; gap < 3.0; gap += 0.1) {
    const double p = nemenyi_p_value(gap, 6, 30);
    CHECK(p <= prev + 1e-12);
    CHECK(p >= 0.0);
    prev = p;
  }
}

TEST_CASE("Nemenyi matrix matches the pairwise function")
{
  const auto m = matrix_of({{0.1, 0.2, 0.3}, {0.15, 0.25, 0.35}, {0.0, 0.5, 0.9}, {0.3, 0.2, 0.1}});
  const auto r = average_ranks(m);
  const auto pw = nemenyi_pairwise(r);
  const auto mr = mean_ranks(r);
  CHECK_FALSE(pw.at(1, 1).has_value());
  CHECK(*pw.at(0, 2) == doctest::Approx(nemenyi_p_value(std::abs(mr[0] - mr[2]), 3, 4)));
  CHECK(*pw.at(0, 2) == *pw.at(2, 0));
}

TEST_CASE("Demsar procedure gates Nemenyi on the Friedman p-value")
{
  const auto consistent = matrix_of({{0.1, 0.2, 0.3}, {0.15, 0.25, 0.35}, {0.0, 0.5, 0.9}});
  const auto r1 = demsar_procedure(consistent, RankScheme::average, 0.05);
  CHECK(r1.friedman.p_value == doctest::Approx(0.0498).epsilon(1e-3));
  CHECK(r1.nemenyi.has_value());

  const auto null = matrix_of({{0.2, 0.2, 0.2}, {0.3, 0.3, 0.3}, {0.4, 0.4, 0.4}});
  const auto r2 = demsar_procedure(null, RankScheme::average, 0.05);
  CHECK_FALSE(r2.nemenyi.has_value());

  auto holes = matrix_of({{0.1, 0.2, 0.3}, {0.15, 0.25, 0.35}, {0.0, 0.5, 0.9}, {0.2, 0.3, 0.4}});
  holes.clear(3, 0);
  const auto r3 = demsar_procedure(holes, RankScheme::average, 0.05);
  CHECK(r3.dropped_datasets == std::vector<std::string>{"d03"});
  CHECK(r3.friedman.n_subjects == 3);
}
