#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "benchstat/error.hpp"
#include "benchstat/special.hpp"

using namespace benchstat;

TEST_CASE("chi-square tail closed forms")
{
  CHECK(chi_square_sf(2.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(chi_square_sf(6.0, 2) == doctest::Approx(std::exp(-3.0)).epsilon(1e-12));
  CHECK(chi_square_sf(0.0, 5) == 1.0);
  // dof 1: P(Z^2 > x) = erfc(sqrt(x/2))
  for (double x : {0.1, 1.0, 3.84, 10.0, 50.0}) {
    CHECK(std::abs(chi_square_sf(x, 1) - std::erfc(std::sqrt(x / 2.0))) < 1e-12);
  }
  // dof 4: e^{-x/2}(1 + x/2)
  for (double x : {0.5, 4.0, 20.0, 150.0}) {
    CHECK(std::abs(chi_square_sf(x, 4) - std::exp(-x / 2) * (1 + x / 2)) < 1e-12);
  }
  CHECK_THROWS_AS(chi_square_sf(-1.0, 2), InputError);
}

TEST_CASE("chi-square sf + cdf = 1")
{
  for (int k : {1, 2, 7, 50, 200}) {
    for (double x : {0.0, 0.3, 5.0, 40.0, 199.0}) {
      CHECK(std::abs(chi_square_sf(x, k) + chi_square_cdf(x, k) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("chi-square even dof matches the Poisson sum")
{
  // Q(k/2, x/2) for even k = sum_{i<k/2} e^{-x/2}(x/2)^i / i!
  for (int k : {2, 10, 60, 200}) {
    for (double x : {1.0, 30.0, 100.0, 200.0}) {
      double term = std::exp(-x / 2.0);
      double sum = 0.0;
      for (int i = 0; i < k / 2; ++i) {
        sum += term;
        term *= (x / 2.0) / (i + 1);
      }
      CHECK(std::abs(chi_square_sf(x, k) - sum) < 1e-10);
    }
  }
}

TEST_CASE("studentized range k=2 identity")
{
  for (double q = 0.0; q <= 8.0; q += 0.25) {
    const double expected = 2.0 * (1.0 - normal_cdf(q / std::sqrt(2.0)));
    CHECK(std::abs(studentized_range_sf(q, 2) - expected) < 1e-6);
  }
  CHECK(studentized_range_sf(1.96 * std::sqrt(2.0), 2) == doctest::Approx(0.05).epsilon(1e-3));
}

TEST_CASE("studentized range basics")
{
  CHECK(studentized_range_sf(0.0, 5) == 1.0);
  CHECK_THROWS_AS(studentized_range_sf(-0.1, 3), InputError);
  CHECK_THROWS_AS(studentized_range_sf(1.0, 1), InputError);
  // monotone in q and in k
  double prev = 1.0;
  for (double q = 0.5; q < 7; q += 0.5) {
    const double v = studentized_range_sf(q, 6);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK(studentized_range_sf(3.0, 5) > studentized_range_sf(3.0, 3));
  // k=3 critical value at alpha 0.05
  CHECK(std::abs(studentized_range_sf(3.314, 3) - 0.05) < 5e-4);
}

TEST_CASE("Gauss-Kronrod integration")
{
  CHECK(integrate_gk15([](double x) { return std::exp(-x * x); }, -12, 12, 1e-12) ==
        doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  CHECK(integrate_gk15([](double x) { return std::sqrt(x); }, 0, 1, 1e-10) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}
