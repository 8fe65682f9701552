#include "benchstat/banova.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "benchstat/error.hpp"
#include "text_util.hpp"

namespace benchstat
{

GammaShapeRate gamma_shape_rate_from_mode_sd(double mode, double sd)
{
  if (!(mode > 0.0) || !(sd > 0.0)) {
    throw InputError("gamma mode and sd must both be positive");
  }
  const double rate = (mode + std::sqrt(mode * mode + 4.0 * sd * sd)) / (2.0 * sd * sd);
  return {1.0 + mode * rate, rate};
}

ModelSpec build_model(const AggregatedMatrix& m, ModelVariant variant)
{
  if (m.n_algorithms() < 2) throw InputError("model needs at least 2 algorithms");
  if (m.n_datasets() < 2) throw InputError("model needs at least 2 datasets");
  const auto n = m.n_present();
  if (n < 2) throw InputError("model needs at least 2 present cells");

  double sum = 0.0;
  for (std::size_t d = 0; d < m.n_datasets(); ++d) {
    for (std::size_t a = 0; a < m.n_algorithms(); ++a) {
      if (m.present(d, a)) sum += m.value(d, a);
    }
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t d = 0; d < m.n_datasets(); ++d) {
    for (std::size_t a = 0; a < m.n_algorithms(); ++a) {
      if (m.present(d, a)) ss += (m.value(d, a) - mean) * (m.value(d, a) - mean);
    }
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw InputError("zero variance: all present cells are equal");

  ModelSpec spec;
  spec.variant = variant;
  spec.y_mean = mean;
  spec.y_sd = sd;
  spec.sigma0_lo = sd / 100.0;
  spec.sigma0_hi = sd * 10.0;
  spec.beta_mean = mean;
  spec.beta_sd = sd * 5.0;
  spec.sigma_a_prior = gamma_shape_rate_from_mode_sd(sd / 2.0, sd * 2.0);
  spec.sigma_d_prior = spec.sigma_a_prior;
  spec.df_rate = 1.0 / 30.0;
  return spec;
}

McmcConfig McmcConfig::desk() { return McmcConfig{}; }

McmcConfig McmcConfig::full()
{
  McmcConfig c;
  c.chains = 4;
  c.adaptation = 5000;
  c.burn_in = 5000;
  c.draws = 25000;
  return c;
}

// ---------------------------------------------------------------------------
// PosteriorDraws

PosteriorDraws::PosteriorDraws(ModelVariant variant, std::vector<std::string> algorithms,
                               std::vector<std::string> datasets, McmcConfig config,
                               std::uint64_t seed)
    : variant_(variant),
      algorithms_(std::move(algorithms)),
      datasets_(std::move(datasets)),
      config_(config),
      seed_(seed)
{
}

std::size_t PosteriorDraws::n_columns() const
{
  return 1 + algorithms_.size() + datasets_.size() + 3 + (variant_ == ModelVariant::robust ? 1 : 0);
}

std::size_t PosteriorDraws::n_draws_per_chain() const
{
  return chains_.empty() ? 0 : chains_.front().size() / n_columns();
}

std::vector<std::string> PosteriorDraws::column_names() const
{
  std::vector<std::string> names{"beta"};
  for (const auto& a : algorithms_) names.push_back("alpha[" + a + "]");
  for (const auto& d : datasets_) names.push_back("delta[" + d + "]");
  names.insert(names.end(), {"sigma0", "sigma_a", "sigma_d"});
  if (variant_ == ModelVariant::robust) names.push_back("df");
  return names;
}

std::vector<std::vector<double>> PosteriorDraws::column(std::size_t col) const
{
  std::vector<std::vector<double>> out(n_chains());
  const auto n = n_draws_per_chain();
  for (std::size_t c = 0; c < n_chains(); ++c) {
    out[c].resize(n);
    for (std::size_t i = 0; i < n; ++i) out[c][i] = get(c, i, col);
  }
  return out;
}

ParameterState PosteriorDraws::state(std::size_t chain, std::size_t draw) const
{
  ParameterState s;
  s.beta = get(chain, draw, beta_column());
  s.alpha.resize(algorithms_.size());
  for (std::size_t a = 0; a < algorithms_.size(); ++a) s.alpha[a] = get(chain, draw, alpha_column(a));
  s.delta.resize(datasets_.size());
  for (std::size_t d = 0; d < datasets_.size(); ++d) s.delta[d] = get(chain, draw, delta_column(d));
  s.sigma0 = get(chain, draw, sigma0_column());
  s.sigma_a = get(chain, draw, sigma_a_column());
  s.sigma_d = get(chain, draw, sigma_d_column());
  if (variant_ == ModelVariant::robust) s.df = get(chain, draw, df_column());
  return s;
}

void PosteriorDraws::add_chain(std::vector<double> rows)
{
  if (rows.empty() || rows.size() % n_columns() != 0) {
    throw InputError("chain data is not a whole number of draws");
  }
  if (!chains_.empty() && rows.size() != chains_.front().size()) {
    throw InputError("all chains must have the same length");
  }
  chains_.push_back(std::move(rows));
}

// ---------------------------------------------------------------------------
// Derived quantities

std::vector<double> pairwise_difference_draws(const PosteriorDraws& p, const std::string& i,
                                              const std::string& j)
{
  if (i == j) throw InputError("pairwise difference needs two distinct algorithms");
  const auto index = [&](const std::string& name) {
    const auto it = std::find(p.algorithms().begin(), p.algorithms().end(), name);
    if (it == p.algorithms().end()) throw InputError("unknown algorithm '" + name + "'");
    return static_cast<std::size_t>(it - p.algorithms().begin());
  };
  const auto ci = p.alpha_column(index(i));
  const auto cj = p.alpha_column(index(j));
  std::vector<double> out;
  out.reserve(p.n_total_draws());
  for (std::size_t c = 0; c < p.n_chains(); ++c) {
    for (std::size_t t = 0; t < p.n_draws_per_chain(); ++t) {
      out.push_back(p.get(c, t, ci) - p.get(c, t, cj));
    }
  }
  return out;
}

PairwiseMatrix rope_probability_matrix(const PosteriorDraws& p, double half_width)
{
  if (!(half_width > 0.0)) throw InputError("ROPE half-width must be positive");
  const auto k = p.algorithms().size();
  std::vector<std::size_t> inside(k * k, 0);
  for (std::size_t c = 0; c < p.n_chains(); ++c) {
    for (std::size_t t = 0; t < p.n_draws_per_chain(); ++t) {
      for (std::size_t i = 0; i < k; ++i) {
        const double ai = p.get(c, t, p.alpha_column(i));
        for (std::size_t j = i + 1; j < k; ++j) {
          if (std::abs(ai - p.get(c, t, p.alpha_column(j))) < half_width) ++inside[i * k + j];
        }
      }
    }
  }
  PairwiseMatrix out(PairwiseKind::rope_prob, p.algorithms());
  const auto total = static_cast<double>(p.n_total_draws());
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      out.set(i, j, static_cast<double>(inside[i * k + j]) / total);
    }
  }
  return out;
}

std::vector<EffectSummary> algorithm_effects(const PosteriorDraws& p)
{
  const auto k = p.algorithms().size();
  std::vector<double> sum(k, 0.0);
  std::vector<double> sum_sq(k, 0.0);
  for (std::size_t c = 0; c < p.n_chains(); ++c) {
    for (std::size_t t = 0; t < p.n_draws_per_chain(); ++t) {
      double center = 0.0;
      for (std::size_t a = 0; a < k; ++a) center += p.get(c, t, p.alpha_column(a));
      center /= static_cast<double>(k);
      for (std::size_t a = 0; a < k; ++a) {
        const double v = p.get(c, t, p.alpha_column(a)) - center;
        sum[a] += v;
        sum_sq[a] += v * v;
      }
    }
  }
  const auto n = static_cast<double>(p.n_total_draws());
  std::vector<EffectSummary> out;
  for (std::size_t a = 0; a < k; ++a) {
    const double mean = sum[a] / n;
    const double var = n > 1 ? (sum_sq[a] - n * mean * mean) / (n - 1.0) : 0.0;
    out.push_back({p.algorithms()[a], mean, std::sqrt(std::max(var, 0.0))});
  }
  return out;
}

double posterior_mean(const PosteriorDraws& p, std::size_t column)
{
  double sum = 0.0;
  for (std::size_t c = 0; c < p.n_chains(); ++c) {
    for (std::size_t t = 0; t < p.n_draws_per_chain(); ++t) sum += p.get(c, t, column);
  }
  return sum / static_cast<double>(p.n_total_draws());
}

// ---------------------------------------------------------------------------
// Persistence

std::string to_string(ModelVariant v) { return v == ModelVariant::normal ? "normal" : "robust"; }

ModelVariant parse_variant(const std::string& s)
{
  if (s == "normal") return ModelVariant::normal;
  if (s == "robust") return ModelVariant::robust;
  throw InputError("unknown model variant '" + s + "' (expected normal or robust)");
}

namespace
{

constexpr std::string_view draws_magic = "# benchstat-draws v1";

std::string join(const std::vector<std::string>& items)
{
  std::string s;
  for (const auto& item : items) {
    if (!s.empty()) s += ',';
    s += item;
  }
  return s;
}

}  // namespace

void save_draws(std::ostream& out, const PosteriorDraws& p)
{
  const auto& cfg = p.config();
  out << draws_magic << '\n';
  out << "# variant=" << to_string(p.variant()) << '\n';
  out << "# n_algorithms=" << p.algorithms().size() << '\n';
  out << "# n_datasets=" << p.datasets().size() << '\n';
  out << "# algorithms=" << join(p.algorithms()) << '\n';
  out << "# datasets=" << join(p.datasets()) << '\n';
  out << "# seed=" << p.seed() << '\n';
  out << "# chains=" << p.n_chains() << '\n';
  out << "# draws_per_chain=" << p.n_draws_per_chain() << '\n';
  out << "# adaptation=" << cfg.adaptation << '\n';
  out << "# burn_in=" << cfg.burn_in << '\n';
  out << "# thin=" << cfg.thin << '\n';
  out << "chain,draw," << join(p.column_names()) << '\n';
  const auto cols = p.n_columns();
  for (std::size_t c = 0; c < p.n_chains(); ++c) {
    for (std::size_t t = 0; t < p.n_draws_per_chain(); ++t) {
      out << c << ',' << t;
      for (std::size_t j = 0; j < cols; ++j) out << ',' << detail::format_roundtrip(p.get(c, t, j));
      out << '\n';
    }
  }
  if (!out) throw InputError("failed writing draws");
}

PosteriorDraws load_draws(std::istream& in)
{
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != draws_magic) {
    throw InputError("not a draws file (missing '" + std::string(draws_magic) + "' header)");
  }
  std::map<std::string, std::string> meta;
  std::string columns_line;
  while (std::getline(in, line)) {
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() != '#') {
      columns_line = std::string(t);
      break;
    }
    const auto body = detail::trim(t.substr(1));
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw InputError("draws header: malformed line '" + line + "'");
    meta[std::string(body.substr(0, eq))] = std::string(body.substr(eq + 1));
  }
  const auto need = [&](const std::string& key) -> const std::string& {
    const auto it = meta.find(key);
    if (it == meta.end()) throw InputError("draws header: missing '" + key + "'");
    return it->second;
  };
  const auto need_int = [&](const std::string& key) {
    const auto v = detail::parse_int(need(key));
    if (!v || *v < 0) throw InputError("draws header: bad integer for '" + key + "'");
    return static_cast<std::uint64_t>(*v);
  };
  const auto names = [](const std::string& s) {
    std::vector<std::string> out;
    for (auto f : detail::split(s, ',')) out.emplace_back(detail::trim(f));
    return out;
  };

  McmcConfig cfg;
  cfg.chains = need_int("chains");
  cfg.draws = need_int("draws_per_chain");
  cfg.adaptation = need_int("adaptation");
  cfg.burn_in = need_int("burn_in");
  cfg.thin = need_int("thin");
  const auto seed = detail::parse_int(need("seed"));
  std::uint64_t seed_value = 0;
  if (seed) {
    seed_value = static_cast<std::uint64_t>(*seed);
  } else {
    // seeds above INT64_MAX
    seed_value = std::stoull(need("seed"));
  }
  PosteriorDraws p(parse_variant(need("variant")), names(need("algorithms")),
                   names(need("datasets")), cfg, seed_value);
  if (p.algorithms().size() != need_int("n_algorithms") ||
      p.datasets().size() != need_int("n_datasets")) {
    throw InputError("draws header: dimension mismatch");
  }
  if (columns_line != "chain,draw," + join(p.column_names())) {
    throw InputError("draws file: unexpected column header");
  }

  const auto cols = p.n_columns();
  std::vector<std::vector<double>> chains(cfg.chains);
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    const auto fields = detail::split(t, ',');
    if (fields.size() != cols + 2) {
      throw InputError("draws file: row " + std::to_string(line_no) + " has wrong field count");
    }
    const auto chain = detail::parse_int(fields[0]);
    if (!chain || *chain < 0 || static_cast<std::uint64_t>(*chain) >= cfg.chains) {
      throw InputError("draws file: bad chain index on row " + std::to_string(line_no));
    }
    auto& dest = chains[static_cast<std::size_t>(*chain)];
    for (std::size_t j = 0; j < cols; ++j) {
      const auto v = detail::parse_double(fields[j + 2]);
      if (!v) throw InputError("draws file: malformed number on row " + std::to_string(line_no));
      dest.push_back(*v);
    }
  }
  for (auto& c : chains) {
    if (c.size() != cfg.draws * cols) throw InputError("draws file: truncated chain");
    p.add_chain(std::move(c));
  }
  return p;
}

void save_draws_file(const std::string& path, const PosteriorDraws& p)
{
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  save_draws(out, p);
}

PosteriorDraws load_draws_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw InputError("cannot open draws file '" + path + "'");
  return load_draws(in);
}

}  // namespace benchstat
