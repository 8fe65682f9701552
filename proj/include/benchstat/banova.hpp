#pragma once

// Two-factor hierarchical Bayesian ANOVA over an algorithm × dataset error
// matrix, its student-t variant, the MCMC engine and ROPE probabilities.
//
//   y_ad    ~ N(beta + alpha_a + delta_d, sigma0)     (robust: t with df)
//   sigma0  ~ U(ySD/100, ySD*10)
//   beta    ~ N(yMean, ySD*5)
//   alpha_a ~ N(0, sigma_a),  delta_d ~ N(0, sigma_d)
//   sigma_a, sigma_d ~ Gamma(mode = ySD/2, sd = ySD*2)
//   df      ~ Exp(rate 1/30)                           (robust only)
//
// Normal scales are standard deviations throughout.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "benchstat/data.hpp"
#include "benchstat/pairwise.hpp"

namespace benchstat
{

enum class ModelVariant
{
  normal,
  robust
};

struct GammaShapeRate
{
  double shape = 1.0;
  double rate = 1.0;
};

/// Converts a Gamma given by its mode and standard deviation into the usual
/// shape/rate pair: rate = (m + sqrt(m^2 + 4 s^2)) / (2 s^2), shape = 1 + m rate.
GammaShapeRate gamma_shape_rate_from_mode_sd(double mode, double sd);

struct ModelSpec
{
  ModelVariant variant = ModelVariant::normal;
  double y_mean = 0.0;
  double y_sd = 1.0;

  double sigma0_lo = 0.01;
  double sigma0_hi = 10.0;
  double beta_mean = 0.0;
  double beta_sd = 5.0;
  GammaShapeRate sigma_a_prior;
  GammaShapeRate sigma_d_prior;
  double df_rate = 1.0 / 30.0;

  // Collapse a prior to a point mass. Used by the sampler oracles and to pin
  // the student-t degrees of freedom.
  std::optional<double> fixed_sigma0;
  std::optional<double> fixed_sigma_a;
  std::optional<double> fixed_sigma_d;
  std::optional<double> fixed_df;
};

/// yMean and ySD (N-1 denominator) over the present cells, priors derived
/// from them. Needs >= 2 algorithms and >= 2 datasets; throws on zero variance.
ModelSpec build_model(const AggregatedMatrix& m, ModelVariant variant);

struct ParameterState
{
  double beta = 0.0;
  std::vector<double> alpha;
  std::vector<double> delta;
  double sigma0 = 1.0;
  double sigma_a = 1.0;
  double sigma_d = 1.0;
  std::optional<double> df;
  /// Per-cell precision multipliers of the student-t scale mixture (robust
  /// only, dataset-major D × A). Not persisted with the draws.
  std::vector<double> latent_scales;
};

struct McmcConfig
{
  std::size_t chains = 4;
  std::size_t adaptation = 1000;  ///< slice widths are tuned here, then frozen
  std::size_t burn_in = 1000;
  std::size_t draws = 5000;       ///< kept draws per chain
  std::size_t thin = 1;
  unsigned threads = 0;           ///< 0: one per hardware thread

  /// 4 chains, 1000 adaptation, 1000 burn-in, 5000 kept draws per chain.
  static McmcConfig desk();
  /// 4 chains, 5000 adaptation, 5000 burn-in, 100000 kept draws in total.
  static McmcConfig full();

  std::size_t iterations() const { return adaptation + burn_in + draws * thin; }
};

/// Kept draws of every chain, one row per draw with the fixed column order
/// beta, alpha_1..alpha_A, delta_1..delta_D, sigma0, sigma_a, sigma_d, [df].
class PosteriorDraws
{
public:
  PosteriorDraws(ModelVariant variant, std::vector<std::string> algorithms,
                 std::vector<std::string> datasets, McmcConfig config, std::uint64_t seed);

  ModelVariant variant() const { return variant_; }
  const std::vector<std::string>& algorithms() const { return algorithms_; }
  const std::vector<std::string>& datasets() const { return datasets_; }
  const McmcConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }

  std::size_t n_columns() const;
  std::size_t n_chains() const { return chains_.size(); }
  std::size_t n_draws_per_chain() const;
  std::size_t n_total_draws() const { return n_chains() * n_draws_per_chain(); }

  std::size_t beta_column() const { return 0; }
  std::size_t alpha_column(std::size_t a) const { return 1 + a; }
  std::size_t delta_column(std::size_t d) const { return 1 + algorithms_.size() + d; }
  std::size_t sigma0_column() const { return 1 + algorithms_.size() + datasets_.size(); }
  std::size_t sigma_a_column() const { return sigma0_column() + 1; }
  std::size_t sigma_d_column() const { return sigma0_column() + 2; }
  std::size_t df_column() const { return sigma0_column() + 3; }  ///< robust only

  /// beta, alpha[name], delta[name], sigma0, sigma_a, sigma_d, [df]
  std::vector<std::string> column_names() const;

  double get(std::size_t chain, std::size_t draw, std::size_t column) const
  {
    return chains_[chain][draw * n_columns() + column];
  }
  /// One sequence per chain for a single column.
  std::vector<std::vector<double>> column(std::size_t column) const;
  ParameterState state(std::size_t chain, std::size_t draw) const;

  /// Appends a new chain with the given row-major values.
  void add_chain(std::vector<double> rows);

private:
  ModelVariant variant_;
  std::vector<std::string> algorithms_;
  std::vector<std::string> datasets_;
  McmcConfig config_;
  std::uint64_t seed_;
  std::vector<std::vector<double>> chains_;
};

/// Runs independent chains, each on its own RNG stream derived from `seed`.
/// Missing cells contribute no likelihood term. Output does not depend on
/// the thread count.
PosteriorDraws run_chains(const ModelSpec& spec, const AggregatedMatrix& data,
                          const McmcConfig& cfg, std::uint64_t seed);

/// alpha_i - alpha_j for every kept draw, chains concatenated in order.
std::vector<double> pairwise_difference_draws(const PosteriorDraws& p, const std::string& i,
                                              const std::string& j);

/// Entry (i, j): fraction of pooled draws with |alpha_i - alpha_j| < half_width.
PairwiseMatrix rope_probability_matrix(const PosteriorDraws& p, double half_width);

struct EffectSummary
{
  std::string algorithm;
  double mean = 0.0;  ///< alpha_a minus the per-draw mean of alpha
  double sd = 0.0;
};

/// Recentered algorithm effects; differences between them equal the raw
/// alpha differences draw by draw.
std::vector<EffectSummary> algorithm_effects(const PosteriorDraws& p);

/// Posterior mean of one column over all chains.
double posterior_mean(const PosteriorDraws& p, std::size_t column);

/// Self-describing text format: '#'-prefixed key=value header, a column
/// header line, then one row per (chain, draw). Numbers are written in
/// shortest round-trip form, so load(save(x)) reproduces x bit for bit.
void save_draws(std::ostream& out, const PosteriorDraws& p);
PosteriorDraws load_draws(std::istream& in);

void save_draws_file(const std::string& path, const PosteriorDraws& p);
PosteriorDraws load_draws_file(const std::string& path);

std::string to_string(ModelVariant v);
ModelVariant parse_variant(const std::string& s);

}  // namespace benchstat
