#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "benchstat/diagnostics.hpp"
#include "benchstat/error.hpp"
#include "benchstat/rng.hpp"
#include "helpers.hpp"

using namespace benchstat;

namespace
{

ChainSet iid_chains(std::size_t m, std::size_t n, std::uint64_t seed)
{
  ChainSet out(m);
  for (std::size_t c = 0; c < m; ++c) {
    auto rng = make_stream(seed, c);
    std::normal_distribution<double> z(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) out[c].push_back(z(rng));
  }
  return out;
}

ChainSet ar1_chains(std::size_t m, std::size_t n, double phi, std::uint64_t seed)
{
  ChainSet out(m);
  for (std::size_t c = 0; c < m; ++c) {
    auto rng = make_stream(seed, c);
    std::normal_distribution<double> z(0.0, 1.0);
    double x = z(rng) / std::sqrt(1.0 - phi * phi);
    for (std::size_t i = 0; i < n; ++i) {
      x = phi * x + z(rng);
      out[c].push_back(x);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("PSRF hand case: two copies of (1,2,3,4)")
{
  const ChainSet c{{1, 2, 3, 4}, {1, 2, 3, 4}};
  const auto r = psrf(c);
  REQUIRE(r.point.has_value());
  CHECK(*r.point == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
  CHECK_FALSE(r.upper_ci.has_value());
}

TEST_CASE("PSRF convergent and divergent chains")
{
  const auto c = iid_chains(2, 10000, 1);
  CHECK(std::abs(*psrf(c).point - 1.0) < 1e-2);
  auto shifted = c;
  for (double& v : shifted[1]) v += 3.0;
  CHECK(*psrf(shifted).point > 1.5);
  // corrected and split variants stay in the same band on good chains
  CHECK(std::abs(*psrf(c, {true, false}).point - 1.0) < 1e-2);
  CHECK(std::abs(*psrf(c, {false, true}).point - 1.0) < 1e-2);
}

TEST_CASE("PSRF and ESS are affine invariant")
{
  const auto c = ar1_chains(3, 2000, 0.5, 2);
  auto t = c;
  for (auto& chain : t) {
    for (double& v : chain) v = 3.0 * v + 2.0;
  }
  CHECK(*psrf(t).point == doctest::Approx(*psrf(c).point).epsilon(1e-10));
  CHECK(*effective_sample_size(t) == doctest::Approx(*effective_sample_size(c)).epsilon(1e-8));
}

TEST_CASE("PSRF and ESS guards")
{
  const ChainSet constant{{1, 1, 1}, {1, 1, 1}};
  CHECK_FALSE(psrf(constant).point.has_value());
  CHECK_FALSE(effective_sample_size(constant).has_value());
  CHECK_THROWS_AS(psrf(ChainSet{{1, 2, 3}}), InputError);
  CHECK_THROWS_AS(psrf(ChainSet{{1, 2, 3}, {1, 2}}), InputError);
}

TEST_CASE("ESS: iid chains")
{
  const auto c = iid_chains(4, 25000, 3);
  const double ess = *effective_sample_size(c);
  CHECK(ess > 0.9e5);
  CHECK(ess < 1.1e5);
}

TEST_CASE("ESS: AR(1) with phi 0.9 is about N/19")
{
  const auto c = ar1_chains(4, 50000, 0.9, 4);
  const double n = 4 * 50000.0;
  const double ess = *effective_sample_size(c);
  CHECK(std::abs(ess / (n * 0.1 / 1.9) - 1.0) < 0.2);
}

namespace
{

McmcConfig ppc_config()
{
  McmcConfig c;
  c.chains = 4;
  c.adaptation = 300;
  c.burn_in = 300;
  c.draws = 500;
  return c;
}

}  // namespace

TEST_CASE("PPC: well-specified data gives a central p-value, an outlier drives it to 0")
{
  // Unclamped Gaussian data from the model itself (values stay far from 0 and 1).
  ScoreMatrix m;
  {
    std::vector<std::string> ds, as;
    for (int d = 0; d < 40; ++d) ds.push_back("d" + std::to_string(100 + d));
    for (int a = 0; a < 5; ++a) as.push_back("a" + std::to_string(a));
    m = ScoreMatrix(ds, as);
    auto rng = make_stream(5, 0);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> delta(40);
    for (auto& v : delta) v = 0.05 * z(rng);
    for (std::size_t d = 0; d < 40; ++d) {
      for (std::size_t a = 0; a < 5; ++a) m.set(d, a, 0.3 + 0.01 * static_cast<double>(a) + delta[d] + 0.02 * z(rng));
    }
  }
  const auto draws = run_chains(build_model(m, ModelVariant::normal), m, ppc_config(), 6);
  const auto r = posterior_predictive_check(draws, m, 1000, 7);
  CHECK(r.t_real.size() == 1000);
  CHECK(r.p_value > 0.3);
  CHECK(r.p_value < 0.7);
  CHECK(r.negative_fraction == 0.0);

  auto spoiled = m;
  double sum = 0, ss = 0;
  for (std::size_t d = 0; d < 40; ++d) {
    for (std::size_t a = 0; a < 5; ++a) sum += m.value(d, a);
  }
  const double mean = sum / 200;
  for (std::size_t d = 0; d < 40; ++d) {
    for (std::size_t a = 0; a < 5; ++a) ss += (m.value(d, a) - mean) * (m.value(d, a) - mean);
  }
  const double ysd = std::sqrt(ss / 199);
  spoiled.set(3, 2, m.value(3, 2) + 10.0 * ysd);
  // With sigma0 free the posterior scale absorbs a single outlier and the
  // chi-square discrepancy stays central; pinned at the generating scale it
  // cannot, and the check rejects.
  const auto free = run_chains(build_model(spoiled, ModelVariant::normal), spoiled, ppc_config(), 6);
  const double p_free = posterior_predictive_check(free, spoiled, 1000, 7).p_value;
  CHECK(p_free > 0.2);
  auto pinned_spec = build_model(spoiled, ModelVariant::normal);
  pinned_spec.fixed_sigma0 = 0.02;
  const auto pinned = run_chains(pinned_spec, spoiled, ppc_config(), 6);
  CHECK(posterior_predictive_check(pinned, spoiled, 1000, 7).p_value < 0.01);
  pinned_spec = build_model(m, ModelVariant::normal);
  pinned_spec.fixed_sigma0 = 0.02;
  const auto clean = run_chains(pinned_spec, m, ppc_config(), 6);
  CHECK(posterior_predictive_check(clean, m, 1000, 7).p_value > 0.05);

  CHECK_THROWS_AS(posterior_predictive_check(draws, m, 0, 1), InputError);
  CHECK_THROWS_AS(posterior_predictive_check(draws, m, draws.n_total_draws() + 1, 1), InputError);
}

TEST_CASE("PPC refuses robust draws")
{
  const auto m = aggregate_errors(generate_synthetic(testutil::planted_spec({0.0, 0.02}, 6, 0.01), 1));
  auto cfg = ppc_config();
  cfg.draws = 50;
  const auto draws = run_chains(build_model(m, ModelVariant::robust), m, cfg, 2);
  try {
    posterior_predictive_check(draws, m, 10, 1);
    FAIL("expected refusal");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("not defined for degrees of freedom below 2") != std::string::npos);
  }
}

TEST_CASE("diagnose reports every column")
{
  const auto m = aggregate_errors(generate_synthetic(testutil::planted_spec({0.0, 0.02, 0.04}, 10, 0.01), 3));
  const auto draws = run_chains(build_model(m, ModelVariant::normal), m, ppc_config(), 4);
  const auto diag = diagnose(draws);
  REQUIRE(diag.size() == draws.n_columns());
  CHECK(diag.front().name == "beta");
  for (const auto& d : diag) {
    REQUIRE(d.rhat.has_value());
    CHECK(*d.rhat < 1.1);
    CHECK(*d.ess > 0.0);
  }
}
