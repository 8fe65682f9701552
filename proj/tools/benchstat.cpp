#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "benchstat/error.hpp"
#include "benchstat/report.hpp"

using namespace benchstat;

namespace
{

struct CommonFlags
{
  std::string format = "csv";
  int digits = 6;
  std::string out;

  void attach(CLI::App* app)
  {
    app->add_option("--format", format, "csv, markdown or json")->capture_default_str();
    app->add_option("--digits", digits, "significant digits")->check(CLI::Range(1, 17))->capture_default_str();
    app->add_option("--out", out, "write the report here instead of stdout");
  }

  OutputOptions options() const
  {
    OutputOptions o;
    o.format = parse_format(format);
    o.digits = digits;
    if (!out.empty()) o.out_path = out;
    return o;
  }
};

std::optional<std::string> opt(const std::string& s)
{
  if (s.empty()) return std::nullopt;
  return s;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"benchstat: frequentist and Bayesian comparison of ML algorithms over benchmark datasets"};
  app.require_subcommand(1);

  // rank
  RankCommand rank;
  std::string rank_scheme = "dense";
  std::string hist_csv, heatmap;
  CommonFlags rank_flags;
  auto* rank_app = app.add_subcommand("rank", "mean rank and top counts per algorithm");
  rank_app->add_option("input", rank.input, "error CSV")->required();
  rank_app->add_option("--scheme,--rank-scheme", rank_scheme, "dense or average")->capture_default_str();
  rank_app->add_option("--histogram-csv", hist_csv, "write rank histogram counts");
  rank_app->add_option("--heatmap-svg", heatmap, "write rank histogram heatmap");
  rank_flags.attach(rank_app);

  // nhst
  NhstCommand nhst;
  std::string nhst_scheme = "average";
  CommonFlags nhst_flags;
  auto* nhst_app = app.add_subcommand("nhst", "Friedman test with Nemenyi post-hoc");
  nhst_app->add_option("input", nhst.input, "error CSV")->required();
  nhst_app->add_option("--scheme,--rank-scheme", nhst_scheme, "dense or average")->capture_default_str();
  nhst_app->add_option("--alpha", nhst.alpha, "significance level")->capture_default_str();
  nhst_flags.attach(nhst_app);

  // threshold
  ThresholdCommand thr;
  CommonFlags thr_flags;
  auto* thr_app = app.add_subcommand("threshold", "irrelevance threshold from resampling and CV noise");
  thr_app->add_option("input", thr.input, "error CSV")->required();
  thr_flags.attach(thr_app);

  // bayes
  BayesCommand bayes;
  std::string input, variant = "normal", config, save, load;
  double rope = 0.0, fixed_df = 0.0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool psrf_correction = false, split_chains = false;
  CommonFlags bayes_flags;
  auto* bayes_app = app.add_subcommand("bayes", "hierarchical Bayesian ANOVA with ROPE probabilities");
  bayes_app->add_option("input", input, "error CSV");
  bayes_app->add_option("--variant", variant, "normal or robust")->capture_default_str();
  auto* rope_opt = bayes_app->add_option("--rope,--rope-half-width", rope,
                                         "ROPE half-width (default: irrelevance threshold)");
  bayes_app->add_option("--config", config, "MCMC key=value file");
  auto* seed_opt = bayes_app->add_option("--seed", seed, "RNG seed (default: fresh entropy)");
  auto* threads_opt = bayes_app->add_option("--threads", threads, "worker threads (0: all cores)");
  bayes_app->add_option("--save", save, "persist the posterior draws");
  bayes_app->add_option("--load", load, "reuse saved draws instead of sampling");
  auto* df_opt = bayes_app->add_option("--fixed-df", fixed_df, "pin the student-t degrees of freedom");
  bayes_app->add_flag("--psrf-correction", psrf_correction, "degrees-of-freedom corrected PSRF");
  bayes_app->add_flag("--split-chains", split_chains, "split chains in half for the PSRF");
  bayes_flags.attach(bayes_app);

  // ppc
  PpcCommand ppc;
  std::uint64_t ppc_seed = 0;
  std::string scatter;
  CommonFlags ppc_flags;
  auto* ppc_app = app.add_subcommand("ppc", "chi-square posterior predictive check");
  ppc_app->add_option("draws", ppc.draws_path, "saved draws")->required();
  ppc_app->add_option("input", ppc.input, "error CSV")->required();
  ppc_app->add_option("--n-draws", ppc.n_draws, "posterior draws to use")->capture_default_str();
  auto* ppc_seed_opt = ppc_app->add_option("--seed", ppc_seed, "RNG seed");
  ppc_app->add_option("--scatter", scatter, "write t_real,t_rep pairs");
  ppc_flags.attach(ppc_app);

  // timing
  TimingCommand timing;
  std::string metric = "one_train_test", timing_scheme = "average";
  CommonFlags timing_flags;
  auto* timing_app = app.add_subcommand("timing", "rank analysis of running times");
  timing_app->add_option("input", timing.input, "timing CSV")->required();
  timing_app->add_option("--metric", metric, "one_train_test or per_hyper")->capture_default_str();
  timing_app->add_option("--scheme,--rank-scheme", timing_scheme, "dense or average")->capture_default_str();
  timing_app->add_option("--alpha", timing.alpha, "significance level")->capture_default_str();
  timing_flags.attach(timing_app);

  // synth
  SynthCommand synth;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  auto* synth_app = app.add_subcommand("synth", "generate an error CSV from a generative spec");
  synth_app->add_option("--spec", synth.spec_path, "key=value spec file")->required();
  auto* synth_seed_opt = synth_app->add_option("--seed", synth_seed, "RNG seed");
  synth_app->add_option("--out", synth_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_input;
  }

  auto& out = std::cout;
  auto& err = std::cerr;
  try {
    if (*rank_app) {
      rank.scheme = parse_rank_scheme(rank_scheme);
      rank.histogram_csv = opt(hist_csv);
      rank.heatmap_svg = opt(heatmap);
      rank.output = rank_flags.options();
      return cmd_rank(rank, out, err);
    }
    if (*nhst_app) {
      nhst.scheme = parse_rank_scheme(nhst_scheme);
      nhst.output = nhst_flags.options();
      return cmd_nhst(nhst, out, err);
    }
    if (*thr_app) {
      thr.output = thr_flags.options();
      return cmd_threshold(thr, out, err);
    }
    if (*bayes_app) {
      bayes.input = opt(input);
      bayes.variant = parse_variant(variant);
      if (rope_opt->count()) bayes.rope_half_width = rope;
      if (!config.empty()) {
        std::ifstream in(config);
        if (!in) throw InputError("cannot open config '" + config + "'");
        bayes.mcmc = parse_mcmc_config(in);
      }
      if (threads_opt->count()) bayes.mcmc.threads = threads;
      if (seed_opt->count()) bayes.seed = seed;
      bayes.save_path = opt(save);
      bayes.load_path = opt(load);
      if (df_opt->count()) bayes.fixed_df = fixed_df;
      bayes.psrf.df_correction = psrf_correction;
      bayes.psrf.split_chains = split_chains;
      bayes.output = bayes_flags.options();
      return cmd_bayes(bayes, out, err);
    }
    if (*ppc_app) {
      if (ppc_seed_opt->count()) ppc.seed = ppc_seed;
      ppc.scatter_csv = opt(scatter);
      ppc.output = ppc_flags.options();
      return cmd_ppc(ppc, out, err);
    }
    if (*timing_app) {
      timing.metric = parse_timing_metric(metric);
      timing.scheme = parse_rank_scheme(timing_scheme);
      timing.output = timing_flags.options();
      return cmd_timing(timing, out, err);
    }
    if (*synth_app) {
      if (synth_seed_opt->count()) synth.seed = synth_seed;
      synth.out_path = opt(synth_out);
      return cmd_synth(synth, out, err);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  }
  return exit_input;
}
