#include "benchstat/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "benchstat/error.hpp"
#include "benchstat/rng.hpp"

namespace benchstat
{

namespace
{

double mean_of(const std::vector<double>& x)
{
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(const std::vector<double>& x, double mean)
{
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

double sample_covariance(const std::vector<double>& x, const std::vector<double>& y)
{
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
  return s / static_cast<double>(x.size() - 1);
}

void check_chains(const ChainSet& chains)
{
  if (chains.size() < 2) throw InputError("diagnostic needs at least 2 chains");
  const auto n = chains.front().size();
  if (n < 2) throw InputError("diagnostic needs chains of length >= 2");
  for (const auto& c : chains) {
    if (c.size() != n) throw InputError("diagnostic needs chains of equal length");
  }
}

ChainSet split_halves(const ChainSet& chains)
{
  ChainSet out;
  for (const auto& c : chains) {
    const auto half = c.size() / 2;
    out.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
    out.emplace_back(c.end() - static_cast<std::ptrdiff_t>(half), c.end());
  }
  return out;
}

}  // namespace

PsrfResult psrf(const ChainSet& input, const PsrfOptions& opts)
{
  check_chains(input);
  const ChainSet chains = opts.split_chains ? split_halves(input) : input;
  if (chains.front().size() < 2) throw InputError("chains too short to split");

  const auto m = static_cast<double>(chains.size());
  const auto n = static_cast<double>(chains.front().size());
  std::vector<double> means;
  std::vector<double> vars;
  for (const auto& c : chains) {
    means.push_back(mean_of(c));
    vars.push_back(sample_variance(c, means.back()));
  }
  const double w = mean_of(vars);
  if (!(w > 0.0)) return {};
  const double b = n * sample_variance(means, mean_of(means));

  PsrfResult out;
  if (!opts.df_correction) {
    const double var_plus = (n - 1.0) / n * w + b / n;
    out.point = std::sqrt(var_plus / w);
    return out;
  }
  // Moment-matched degrees of freedom of the pooled variance estimate.
  std::vector<double> means_sq;
  for (double x : means) means_sq.push_back(x * x);
  const double var_w = sample_variance(vars, w) / m;
  const double var_b = 2.0 * b * b / (m - 1.0);
  const double cov_wb = (n / m) * (sample_covariance(vars, means_sq) -
                                   2.0 * mean_of(means) * sample_covariance(vars, means));
  const double v = (n - 1.0) / n * w + (1.0 + 1.0 / m) * b / n;
  const double var_v = ((n - 1.0) * (n - 1.0) * var_w + (1.0 + 1.0 / m) * (1.0 + 1.0 / m) * var_b +
                        2.0 * (n - 1.0) * (1.0 + 1.0 / m) * cov_wb) /
                       (n * n);
  const double df = var_v > 0.0 ? 2.0 * v * v / var_v : std::numeric_limits<double>::infinity();
  const double adj = std::isinf(df) ? 1.0 : (df + 3.0) / (df + 1.0);
  out.point = std::sqrt(v / w * adj);
  return out;
}

namespace
{

std::optional<double> chain_ess(const std::vector<double>& x)
{
  const auto n = x.size();
  const double mean = mean_of(x);
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = x[i] - mean;
  const auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += centered[i] * centered[i + lag];
    return s / static_cast<double>(n);
  };
  const double gamma0 = autocov(0);
  if (!(gamma0 > 0.0)) return std::nullopt;

  // Sum pairs rho(2m) + rho(2m+1) while they stay positive.
  double sum_pairs = 0.0;
  for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
    const double pair = (autocov(lag) + autocov(lag + 1)) / gamma0;
    if (!(pair > 0.0)) break;
    sum_pairs += pair;
  }
  const double tau = -1.0 + 2.0 * sum_pairs;
  if (!(tau > 0.0)) return static_cast<double>(n);
  return static_cast<double>(n) / tau;
}

}  // namespace

std::optional<double> effective_sample_size(const ChainSet& chains)
{
  check_chains(chains);
  double total = 0.0;
  for (const auto& c : chains) {
    const auto ess = chain_ess(c);
    if (!ess) return std::nullopt;
    total += *ess;
  }
  return total;
}

std::vector<ParameterDiagnostic> diagnose(const PosteriorDraws& p, const PsrfOptions& opts)
{
  std::vector<ParameterDiagnostic> out;
  const auto names = p.column_names();
  for (std::size_t j = 0; j < p.n_columns(); ++j) {
    const auto chains = p.column(j);
    out.push_back({names[j], psrf(chains, opts).point, effective_sample_size(chains)});
  }
  return out;
}

PpcResult posterior_predictive_check(const PosteriorDraws& p, const AggregatedMatrix& data,
                                     std::size_t n_draws, std::uint64_t seed)
{
  if (p.variant() != ModelVariant::normal) {
    throw InputError(
        "posterior predictive check is defined only for the normal model: the chi-square "
        "discrepancy needs the data variance, and the variance of the student-t is not defined "
        "for degrees of freedom below 2");
  }
  if (n_draws == 0) throw InputError("posterior predictive check needs n_draws >= 1");
  if (n_draws > p.n_total_draws()) {
    throw InputError("n_draws exceeds the number of kept draws (" +
                     std::to_string(p.n_total_draws()) + ")");
  }
  if (data.algorithms() != p.algorithms() || data.datasets() != p.datasets()) {
    throw InputError("data and draws do not describe the same algorithms and datasets");
  }

  auto rng = make_stream(seed, 7);
  std::vector<std::size_t> all(p.n_total_draws());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> picked;
  picked.reserve(n_draws);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), n_draws, rng);

  std::normal_distribution<double> unit(0.0, 1.0);
  PpcResult out;
  std::size_t exceed = 0;
  std::size_t negative = 0;
  std::size_t n_rep_cells = 0;
  for (const auto flat : picked) {
    const auto chain = flat / p.n_draws_per_chain();
    const auto draw = flat % p.n_draws_per_chain();
    const auto s = p.state(chain, draw);
    const double var = s.sigma0 * s.sigma0;
    double t_real = 0.0;
    double t_rep = 0.0;
    for (std::size_t d = 0; d < data.n_datasets(); ++d) {
      for (std::size_t a = 0; a < data.n_algorithms(); ++a) {
        if (!data.present(d, a)) continue;
        const double nu = s.beta + s.alpha[a] + s.delta[d];
        const double y = data.value(d, a);
        const double y_rep = nu + s.sigma0 * unit(rng);
        t_real += (y - nu) * (y - nu) / var;
        t_rep += (y_rep - nu) * (y_rep - nu) / var;
        if (y_rep < 0.0) ++negative;
        ++n_rep_cells;
      }
    }
    out.t_real.push_back(t_real);
    out.t_rep.push_back(t_rep);
    if (t_rep >= t_real) ++exceed;
  }
  out.p_value = static_cast<double>(exceed) / static_cast<double>(n_draws);
  out.negative_fraction =
      n_rep_cells == 0 ? 0.0 : static_cast<double>(negative) / static_cast<double>(n_rep_cells);
  return out;
}

}  // namespace benchstat
