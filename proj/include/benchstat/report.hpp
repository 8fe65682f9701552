#pragma once

// Command orchestration and rendering for the `benchstat` CLI. Every command
// is an ordinary function so it can be driven in-process by tests.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "benchstat/banova.hpp"
#include "benchstat/data.hpp"
#include "benchstat/diagnostics.hpp"
#include "benchstat/nhst.hpp"
#include "benchstat/ranks.hpp"
#include "benchstat/threshold.hpp"

namespace benchstat
{

enum class Format
{
  csv,
  markdown,
  json
};

Format parse_format(const std::string& s);
RankScheme parse_rank_scheme(const std::string& s);
TimingMetric parse_timing_metric(const std::string& s);

/// Exit codes shared by every command.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_input = 2;

struct OutputOptions
{
  Format format = Format::csv;
  int digits = 6;                       ///< significant digits in every rendering
  std::optional<std::string> out_path;  ///< stdout when absent
};

/// `digits` significant digits, shortest form ("%.*g").
std::string format_number(double v, int digits = 6);

struct RankCommand
{
  std::string input;
  RankScheme scheme = RankScheme::dense;
  std::optional<std::string> histogram_csv;
  std::optional<std::string> heatmap_svg;
  OutputOptions output;
};

struct NhstCommand
{
  std::string input;
  RankScheme scheme = RankScheme::average;
  double alpha = 0.05;
  OutputOptions output;
};

struct ThresholdCommand
{
  std::string input;
  OutputOptions output;
};

struct BayesCommand
{
  std::optional<std::string> input;       ///< error table; optional with --load and --rope
  ModelVariant variant = ModelVariant::normal;
  std::optional<double> rope_half_width;  ///< defaults to the computed irrelevance threshold
  McmcConfig mcmc = McmcConfig::desk();
  std::optional<std::uint64_t> seed;
  std::optional<std::string> save_path;
  std::optional<std::string> load_path;
  std::optional<double> fixed_df;
  PsrfOptions psrf;
  OutputOptions output;
};

struct PpcCommand
{
  std::string draws_path;
  std::string input;
  std::size_t n_draws = 1667;  ///< capped at the number of kept draws
  std::optional<std::uint64_t> seed;
  std::optional<std::string> scatter_csv;
  OutputOptions output;
};

struct TimingCommand
{
  std::string input;
  TimingMetric metric = TimingMetric::one_train_test;
  RankScheme scheme = RankScheme::average;
  double alpha = 0.05;
  OutputOptions output;
};

struct SynthCommand
{
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
};

// Each command writes its report to `out` (or --out) and diagnostics to
// `err`, and returns an exit code: 0 success, 1 numerical/internal failure,
// 2 input or usage error.
int cmd_rank(const RankCommand& c, std::ostream& out, std::ostream& err);
int cmd_nhst(const NhstCommand& c, std::ostream& out, std::ostream& err);
int cmd_threshold(const ThresholdCommand& c, std::ostream& out, std::ostream& err);
int cmd_bayes(const BayesCommand& c, std::ostream& out, std::ostream& err);
int cmd_ppc(const PpcCommand& c, std::ostream& out, std::ostream& err);
int cmd_timing(const TimingCommand& c, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthCommand& c, std::ostream& out, std::ostream& err);

/// key=value MCMC settings: preset (desk|full), chains, adaptation,
/// burn_in, draws, thin, threads. Unknown keys are rejected.
McmcConfig parse_mcmc_config(std::istream& in, McmcConfig base = McmcConfig::desk());

// Renderers, exposed for reuse and tests.
std::string render_rank_summary(const std::vector<RankSummaryRow>& rows, RankScheme scheme,
                                const std::vector<std::string>& warnings, const OutputOptions& o);
std::string render_demsar(const DemsarResult& r, double alpha, const OutputOptions& o);
std::string render_threshold(const ThresholdReport& r, const OutputOptions& o);
std::string render_pairwise(const PairwiseMatrix& m, const std::vector<std::string>& order,
                            std::optional<double> flag_below, const OutputOptions& o);

}  // namespace benchstat
