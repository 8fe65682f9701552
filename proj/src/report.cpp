#include "benchstat/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "benchstat/error.hpp"
#include "benchstat/rng.hpp"
#include "text_util.hpp"

namespace benchstat
{

using json = nlohmann::ordered_json;

Format parse_format(const std::string& s)
{
  if (s == "csv") return Format::csv;
  if (s == "markdown" || s == "md") return Format::markdown;
  if (s == "json") return Format::json;
  throw InputError("unknown format '" + s + "' (expected csv, markdown or json)");
}

RankScheme parse_rank_scheme(const std::string& s)
{
  if (s == "dense") return RankScheme::dense;
  if (s == "average") return RankScheme::average;
  throw InputError("unknown rank scheme '" + s + "' (expected dense or average)");
}

TimingMetric parse_timing_metric(const std::string& s)
{
  if (s == "one_train_test") return TimingMetric::one_train_test;
  if (s == "per_hyper") return TimingMetric::per_hyper;
  throw InputError("unknown timing metric '" + s + "' (expected one_train_test or per_hyper)");
}

std::string format_number(double v, int digits)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

namespace
{

std::string to_string(RankScheme s) { return s == RankScheme::dense ? "dense" : "average"; }

/// The rendered value, so JSON carries the same digits as CSV and markdown.
double rounded(double v, int digits) { return std::stod(format_number(v, digits)); }

struct Table
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string render_table(const Table& t, Format f)
{
  std::ostringstream os;
  const auto line = [&](const std::vector<std::string>& cells) {
    if (f == Format::csv) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
      os << '\n';
    } else {
      os << '|';
      for (const auto& c : cells) os << ' ' << c << " |";
      os << '\n';
    }
  };
  line(t.header);
  if (f == Format::markdown) {
    os << '|';
    for (std::size_t i = 0; i < t.header.size(); ++i) os << " --- |";
    os << '\n';
  }
  for (const auto& r : t.rows) line(r);
  return os.str();
}

std::string comment(Format f, const std::string& text)
{
  if (f == Format::csv) return "# " + text + "\n";
  return "_" + text + "_\n\n";
}

std::string heading(Format f, const std::string& text)
{
  if (f == Format::csv) return "# " + text + "\n";
  return "## " + text + "\n\n";
}

void emit(const OutputOptions& o, const std::string& text, std::ostream& out)
{
  if (o.out_path) {
    std::ofstream file(*o.out_path);
    if (!file) throw InputError("cannot open '" + *o.out_path + "' for writing");
    file << text;
    return;
  }
  out << text;
}

std::ifstream open_input(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input '" + path + "'");
  return in;
}

ErrorTable load_error_table(const std::string& path)
{
  auto in = open_input(path);
  auto table = ingest_error_table(in);
  if (table.records.empty()) throw InputError("input '" + path + "' has no records");
  return table;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn)
{
  try {
    fn();
    return exit_ok;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return exit_failure;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_failure;
  }
}

void print_warnings(std::ostream& err, const std::vector<std::string>& warnings)
{
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

std::vector<std::string> order_by(const std::vector<std::string>& names,
                                  const std::vector<double>& keys)
{
  std::vector<std::size_t> idx(names.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    if (keys[x] != keys[y]) return keys[x] < keys[y];
    return names[x] < names[y];
  });
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(names[i]);
  return out;
}

std::size_t index_of(const std::vector<std::string>& names, const std::string& name)
{
  return static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin());
}

json pairwise_json(const PairwiseMatrix& m, const std::vector<std::string>& order,
                   std::optional<double> flag_below, int digits)
{
  json j;
  j["algorithms"] = order;
  json values = json::array();
  json flags = json::array();
  for (const auto& r : order) {
    json row = json::array();
    json flag_row = json::array();
    for (const auto& c : order) {
      const auto v = m.at(index_of(m.algorithms(), r), index_of(m.algorithms(), c));
      if (v) {
        row.push_back(rounded(*v, digits));
        flag_row.push_back(flag_below && *v < *flag_below);
      } else {
        row.push_back(nullptr);
        flag_row.push_back(nullptr);
      }
    }
    values.push_back(std::move(row));
    flags.push_back(std::move(flag_row));
  }
  j["values"] = std::move(values);
  if (flag_below) j["significant"] = std::move(flags);
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// Renderers

std::string render_rank_summary(const std::vector<RankSummaryRow>& rows, RankScheme scheme,
                                const std::vector<std::string>& warnings, const OutputOptions& o)
{
  if (o.format == Format::json) {
    json j;
    j["scheme"] = to_string(scheme);
    json arr = json::array();
    for (const auto& r : rows) {
      json e;
      e["algorithm"] = r.algorithm;
      e["mean_rank"] = rounded(r.mean_rank, o.digits);
      e["top_count"] = r.top_count;
      e["n_datasets"] = r.n_datasets;
      arr.push_back(std::move(e));
    }
    j["rows"] = std::move(arr);
    j["warnings"] = warnings;
    return j.dump(2) + "\n";
  }
  Table t{{"algorithm", "mean_rank", "top_count"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({r.algorithm, format_number(r.mean_rank, o.digits), std::to_string(r.top_count)});
  }
  return render_table(t, o.format);
}

std::string render_pairwise(const PairwiseMatrix& m, const std::vector<std::string>& order,
                            std::optional<double> flag_below, const OutputOptions& o)
{
  if (o.format == Format::json) return pairwise_json(m, order, flag_below, o.digits).dump(2) + "\n";
  const auto value = [&](std::size_t r, std::size_t c) {
    return *m.at(index_of(m.algorithms(), order[r]), index_of(m.algorithms(), order[c]));
  };
  if (o.format == Format::csv) {
    const std::string name = m.kind() == PairwiseKind::nemenyi_p ? "p_value" : "probability";
    Table t{{"row", "col", name}, {}};
    if (flag_below) t.header.push_back("significant");
    for (std::size_t r = 1; r < order.size(); ++r) {
      for (std::size_t c = 0; c < r; ++c) {
        const double v = value(r, c);
        std::vector<std::string> row{order[r], order[c], format_number(v, o.digits)};
        if (flag_below) row.push_back(v < *flag_below ? "1" : "0");
        t.rows.push_back(std::move(row));
      }
    }
    return render_table(t, o.format);
  }
  // lower-triangular markdown table, flagged cells in bold
  Table t{{""}, {}};
  for (std::size_t c = 0; c + 1 < order.size(); ++c) t.header.push_back(order[c]);
  for (std::size_t r = 1; r < order.size(); ++r) {
    std::vector<std::string> row{order[r]};
    for (std::size_t c = 0; c + 1 < order.size(); ++c) {
      if (c >= r) {
        row.emplace_back("");
        continue;
      }
      const double v = value(r, c);
      auto cell = format_number(v, o.digits);
      if (flag_below && v < *flag_below) cell = "**" + cell + "**";
      row.push_back(std::move(cell));
    }
    t.rows.push_back(std::move(row));
  }
  return render_table(t, o.format);
}

std::string render_demsar(const DemsarResult& r, double alpha, const OutputOptions& o)
{
  const auto order = order_by(r.algorithms, r.mean_ranks);
  if (o.format == Format::json) {
    json j;
    j["scheme"] = to_string(r.scheme);
    j["alpha"] = alpha;
    json f;
    f["statistic"] = rounded(r.friedman.statistic, o.digits);
    f["dof"] = r.friedman.dof;
    f["p_value"] = rounded(r.friedman.p_value, o.digits);
    f["n_subjects"] = r.friedman.n_subjects;
    f["k_treatments"] = r.friedman.k_treatments;
    j["friedman"] = std::move(f);
    json ranks = json::array();
    for (const auto& name : order) {
      json e;
      e["algorithm"] = name;
      e["mean_rank"] = rounded(r.mean_ranks[index_of(r.algorithms, name)], o.digits);
      ranks.push_back(std::move(e));
    }
    j["mean_ranks"] = std::move(ranks);
    j["nemenyi"] = r.nemenyi ? pairwise_json(*r.nemenyi, order, alpha, o.digits) : json(nullptr);
    j["dropped_datasets"] = r.dropped_datasets;
    return j.dump(2) + "\n";
  }

  std::string s;
  s += heading(o.format, "Friedman test (" + to_string(r.scheme) + " ranks)");
  Table f{{"statistic", "dof", "p_value", "n_subjects", "k_treatments"},
          {{format_number(r.friedman.statistic, o.digits), std::to_string(r.friedman.dof),
            format_number(r.friedman.p_value, o.digits), std::to_string(r.friedman.n_subjects),
            std::to_string(r.friedman.k_treatments)}}};
  s += render_table(f, o.format);
  s += "\n" + heading(o.format, "Mean ranks");
  Table m{{"algorithm", "mean_rank"}, {}};
  for (const auto& name : order) {
    m.rows.push_back({name, format_number(r.mean_ranks[index_of(r.algorithms, name)], o.digits)});
  }
  s += render_table(m, o.format);
  s += "\n" + heading(o.format, "Nemenyi pairwise p-values");
  if (r.nemenyi) {
    s += render_pairwise(*r.nemenyi, order, alpha, o);
  } else {
    s += comment(o.format, "Nemenyi test skipped: Friedman p-value " +
                               format_number(r.friedman.p_value, o.digits) + " is not below alpha " +
                               format_number(alpha, o.digits));
  }
  return s;
}

std::string render_threshold(const ThresholdReport& r, const OutputOptions& o)
{
  if (o.format == Format::json) {
    json j;
    j["median_delta_resample"] = rounded(r.median_delta_resample, o.digits);
    j["median_delta_cv"] = r.median_delta_cv ? json(rounded(*r.median_delta_cv, o.digits)) : json(nullptr);
    j["threshold"] = rounded(r.threshold, o.digits);
    j["n_pairs_used"] = r.n_pairs_used;
    j["n_cv_records_used"] = r.n_cv_records_used;
    return j.dump(2) + "\n";
  }
  Table t{{"median_delta_resample", "median_delta_cv", "threshold"},
          {{format_number(r.median_delta_resample, o.digits),
            r.median_delta_cv ? format_number(*r.median_delta_cv, o.digits) : "",
            format_number(r.threshold, o.digits)}}};
  return render_table(t, o.format);
}

// ---------------------------------------------------------------------------
// Commands

int cmd_rank(const RankCommand& c, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    if (c.scheme == RankScheme::average && (c.histogram_csv || c.heatmap_svg)) {
      throw InputError("rank histogram exports need --scheme dense");
    }
    const auto matrix = aggregate_errors(load_error_table(c.input));
    const auto ranks = rank_scores(matrix, c.scheme);
    print_warnings(err, ranks.warnings);
    emit(c.output, render_rank_summary(mean_rank_summary(ranks), c.scheme, ranks.warnings, c.output),
         out);
    if (c.histogram_csv || c.heatmap_svg) {
      const auto hist = rank_histogram(ranks);
      if (c.histogram_csv) {
        std::ofstream f(*c.histogram_csv);
        if (!f) throw InputError("cannot open '" + *c.histogram_csv + "' for writing");
        write_histogram_csv(f, hist);
      }
      if (c.heatmap_svg) {
        std::ofstream f(*c.heatmap_svg);
        if (!f) throw InputError("cannot open '" + *c.heatmap_svg + "' for writing");
        write_histogram_svg(f, hist);
      }
    }
  });
}

int cmd_nhst(const NhstCommand& c, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    const auto matrix = aggregate_errors(load_error_table(c.input));
    const auto result = demsar_procedure(matrix, c.scheme, c.alpha);
    print_warnings(err, result.warnings);
    if (!result.nemenyi) err << "notice: Friedman p >= alpha, Nemenyi test skipped\n";
    emit(c.output, render_demsar(result, c.alpha, c.output), out);
  });
}

int cmd_threshold(const ThresholdCommand& c, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    const auto report = irrelevance_threshold(load_error_table(c.input));
    print_warnings(err, report.warnings);
    emit(c.output, render_threshold(report, c.output), out);
  });
}

namespace
{

std::string render_bayes(const PosteriorDraws& draws, double rope, bool rope_computed,
                         const PsrfOptions& psrf_opts, const OutputOptions& o)
{
  const auto matrix = rope_probability_matrix(draws, rope);
  const auto effects = algorithm_effects(draws);
  std::vector<double> keys;
  for (const auto& e : effects) keys.push_back(e.mean);
  const auto order = order_by(draws.algorithms(), keys);
  const auto diag = diagnose(draws, psrf_opts);
  const auto& cfg = draws.config();
  std::optional<double> df_mean;
  if (draws.variant() == ModelVariant::robust) df_mean = posterior_mean(draws, draws.df_column());

  if (o.format == Format::json) {
    json j;
    j["seed"] = draws.seed();
    j["variant"] = to_string(draws.variant());
    j["rope_half_width"] = rope;
    j["rope_source"] = rope_computed ? "irrelevance_threshold" : "flag";
    j["mcmc"] = {{"chains", draws.n_chains()},
                 {"adaptation", cfg.adaptation},
                 {"burn_in", cfg.burn_in},
                 {"draws_per_chain", draws.n_draws_per_chain()},
                 {"thin", cfg.thin}};
    j["rope"] = pairwise_json(matrix, order, std::nullopt, o.digits);
    json eff = json::array();
    for (const auto& name : order) {
      const auto& e = effects[index_of(draws.algorithms(), name)];
      eff.push_back({{"algorithm", e.algorithm},
                     {"mean", rounded(e.mean, o.digits)},
                     {"sd", rounded(e.sd, o.digits)}});
    }
    j["effects"] = std::move(eff);
    if (df_mean) j["df_posterior_mean"] = rounded(*df_mean, o.digits);
    json d = json::array();
    for (const auto& row : diag) {
      d.push_back({{"parameter", row.name},
                   {"rhat", row.rhat ? json(rounded(*row.rhat, o.digits)) : json(nullptr)},
                   {"ess", row.ess ? json(rounded(*row.ess, o.digits)) : json(nullptr)}});
    }
    j["diagnostics"] = std::move(d);
    j["notes"] = {"multivariate PSRF is not reported"};
    return j.dump(2) + "\n";
  }

  std::string s;
  s += comment(o.format, "seed=" + std::to_string(draws.seed()));
  s += comment(o.format, "variant=" + to_string(draws.variant()));
  s += comment(o.format, "rope_half_width=" + format_number(rope, o.digits) +
                             (rope_computed ? " (irrelevance threshold)" : ""));
  s += comment(o.format, "chains=" + std::to_string(draws.n_chains()) +
                             " adaptation=" + std::to_string(cfg.adaptation) +
                             " burn_in=" + std::to_string(cfg.burn_in) +
                             " draws_per_chain=" + std::to_string(draws.n_draws_per_chain()) +
                             " thin=" + std::to_string(cfg.thin));
  if (df_mean) s += comment(o.format, "df_posterior_mean=" + format_number(*df_mean, o.digits));
  s += heading(o.format, "ROPE probabilities");
  s += render_pairwise(matrix, order, std::nullopt, o);
  s += "\n" + heading(o.format, "Algorithm effects (recentered)");
  Table e{{"algorithm", "mean", "sd"}, {}};
  for (const auto& name : order) {
    const auto& eff = effects[index_of(draws.algorithms(), name)];
    e.rows.push_back({name, format_number(eff.mean, o.digits), format_number(eff.sd, o.digits)});
  }
  s += render_table(e, o.format);
  s += "\n" + heading(o.format, "Convergence diagnostics");
  Table d{{"parameter", "rhat", "ess"}, {}};
  for (const auto& row : diag) {
    d.rows.push_back({row.name, row.rhat ? format_number(*row.rhat, o.digits) : "undefined",
                      row.ess ? format_number(*row.ess, o.digits) : "undefined"});
  }
  s += render_table(d, o.format);
  if (o.format == Format::markdown) s += "\n";
  s += comment(o.format, "multivariate PSRF is not reported");
  return s;
}

}  // namespace

int cmd_bayes(const BayesCommand& c, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    std::optional<ErrorTable> table;
    if (c.input) table = load_error_table(*c.input);

    double rope = 0.0;
    bool rope_computed = false;
    if (c.rope_half_width) {
      rope = *c.rope_half_width;
      if (!(rope > 0.0)) throw InputError("--rope must be positive");
    } else {
      if (!table) throw InputError("--rope is required when no --input is given");
      const auto report = irrelevance_threshold(*table);
      rope = report.threshold;
      rope_computed = true;
      if (!(rope > 0.0)) throw InputError("computed irrelevance threshold is zero; pass --rope");
    }

    std::optional<PosteriorDraws> draws;
    if (c.load_path) {
      draws = load_draws_file(*c.load_path);
    } else {
      if (!table) throw InputError("--input is required unless --load is given");
      const auto matrix = aggregate_errors(*table);
      auto spec = build_model(matrix, c.variant);
      if (c.fixed_df) {
        if (c.variant != ModelVariant::robust) throw InputError("--fixed-df needs --variant robust");
        spec.fixed_df = *c.fixed_df;
      }
      const auto seed = c.seed.value_or(entropy_seed());
      draws = run_chains(spec, matrix, c.mcmc, seed);
    }
    if (c.save_path) save_draws_file(*c.save_path, *draws);
    emit(c.output, render_bayes(*draws, rope, rope_computed, c.psrf, c.output), out);
  });
}

int cmd_ppc(const PpcCommand& c, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    const auto draws = load_draws_file(c.draws_path);
    const auto matrix = aggregate_errors(load_error_table(c.input));
    const auto n = std::min(c.n_draws, draws.n_total_draws());
    const auto seed = c.seed.value_or(entropy_seed());
    const auto result = posterior_predictive_check(draws, matrix, n, seed);
    if (c.scatter_csv) {
      std::ofstream f(*c.scatter_csv);
      if (!f) throw InputError("cannot open '" + *c.scatter_csv + "' for writing");
      f << "t_real,t_rep\n";
      for (std::size_t i = 0; i < result.t_real.size(); ++i) {
        f << detail::format_roundtrip(result.t_real[i]) << ','
          << detail::format_roundtrip(result.t_rep[i]) << '\n';
      }
    }
    const auto& o = c.output;
    if (o.format == Format::json) {
      json j;
      j["seed"] = seed;
      j["n_draws"] = n;
      j["p_value"] = rounded(result.p_value, o.digits);
      j["negative_replicate_fraction"] = rounded(result.negative_fraction, o.digits);
      emit(o, j.dump(2) + "\n", out);
      return;
    }
    Table t{{"seed", "n_draws", "p_value", "negative_replicate_fraction"},
            {{std::to_string(seed), std::to_string(n), format_number(result.p_value, o.digits),
              format_number(result.negative_fraction, o.digits)}}};
    emit(o, render_table(t, o.format), out);
  });
}

int cmd_timing(const TimingCommand& c, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    auto in = open_input(c.input);
    const auto table = ingest_timing_table(in);
    if (table.records.empty()) throw InputError("input '" + c.input + "' has no records");
    const auto matrix = timing_matrix(table, c.metric);
    const auto ranks = rank_scores(matrix, c.scheme);
    print_warnings(err, ranks.warnings);
    const auto summary = mean_rank_summary(ranks);
    const auto demsar = demsar_procedure(matrix, c.scheme, c.alpha);
    print_warnings(err, demsar.warnings);
    if (!demsar.nemenyi) err << "notice: Friedman p >= alpha, Nemenyi test skipped\n";

    const auto& o = c.output;
    const std::string metric =
        c.metric == TimingMetric::one_train_test ? "one_train_test" : "per_hyper";
    if (o.format == Format::json) {
      json j;
      j["metric"] = metric;
      j["summary"] = json::parse(render_rank_summary(summary, c.scheme, ranks.warnings, o));
      j["demsar"] = json::parse(render_demsar(demsar, c.alpha, o));
      emit(o, j.dump(2) + "\n", out);
      return;
    }
    std::string s = heading(o.format, "Mean rank (" + metric + ", subjects = dataset halves)");
    s += render_rank_summary(summary, c.scheme, ranks.warnings, o);
    s += "\n" + render_demsar(demsar, c.alpha, o);
    emit(o, s, out);
  });
}

int cmd_synth(const SynthCommand& c, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    auto in = open_input(c.spec_path);
    const auto spec = parse_synth_spec(in);
    const auto seed = c.seed.value_or(entropy_seed());
    const auto table = generate_synthetic(spec, seed);
    std::ostringstream os;
    os << "# seed=" << seed << '\n';
    std::istringstream echo(render_synth_spec(spec));
    for (std::string line; std::getline(echo, line);) os << "# " << line << '\n';
    write_error_table(os, table);
    OutputOptions o;
    o.out_path = c.out_path;
    emit(o, os.str(), out);
  });
}

McmcConfig parse_mcmc_config(std::istream& in, McmcConfig base)
{
  McmcConfig cfg = base;
  std::string raw;
  while (std::getline(in, raw)) {
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("config: expected key=value, got '" + std::string(line) + "'");
    }
    const auto key = std::string(detail::trim(line.substr(0, eq)));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key == "preset") {
      if (value == "desk") {
        cfg = McmcConfig::desk();
      } else if (value == "full") {
        cfg = McmcConfig::full();
      } else {
        throw InputError("config: unknown preset '" + std::string(value) + "'");
      }
      continue;
    }
    const auto v = detail::parse_int(value);
    if (!v || *v < 0) throw InputError("config: '" + key + "' needs a non-negative integer");
    const auto n = static_cast<std::size_t>(*v);
    if (key == "chains") {
      cfg.chains = n;
    } else if (key == "adaptation") {
      cfg.adaptation = n;
    } else if (key == "burn_in") {
      cfg.burn_in = n;
    } else if (key == "draws") {
      cfg.draws = n;
    } else if (key == "thin") {
      cfg.thin = n;
    } else if (key == "threads") {
      cfg.threads = static_cast<unsigned>(n);
    } else {
      throw InputError("config: unknown key '" + key + "'");
    }
  }
  return cfg;
}

}  // namespace benchstat
