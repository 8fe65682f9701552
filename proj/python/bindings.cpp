#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "benchstat/banova.hpp"
#include "benchstat/data.hpp"
#include "benchstat/diagnostics.hpp"
#include "benchstat/error.hpp"
#include "benchstat/nhst.hpp"
#include "benchstat/ranks.hpp"
#include "benchstat/report.hpp"
#include "benchstat/special.hpp"
#include "benchstat/threshold.hpp"

namespace py = pybind11;
using namespace benchstat;

namespace
{

py::object optional_to_py(const std::optional<double>& v)
{
  return v ? py::cast(*v) : py::none();
}

py::list pairwise_rows(const PairwiseMatrix& m)
{
  py::list rows;
  for (std::size_t i = 0; i < m.size(); ++i) {
    py::list row;
    for (std::size_t j = 0; j < m.size(); ++j) row.append(optional_to_py(m.at(i, j)));
    rows.append(row);
  }
  return rows;
}

py::dict pairwise_dict(const PairwiseMatrix& m)
{
  py::dict d;
  d["algorithms"] = m.algorithms();
  d["values"] = pairwise_rows(m);
  return d;
}

ErrorTable synthesize(const std::string& spec_text, std::uint64_t seed)
{
  std::istringstream in(spec_text);
  return generate_synthetic(parse_synth_spec(in), seed);
}

}  // namespace

PYBIND11_MODULE(_benchstat, m)
{
  m.doc() = "Rank tests, irrelevance threshold and Bayesian ANOVA for benchmark comparisons";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  // special functions
  m.def("chi_square_sf", &chi_square_sf, py::arg("x"), py::arg("dof"));
  m.def("studentized_range_sf", &studentized_range_sf, py::arg("q"), py::arg("k"));
  m.def("gamma_shape_rate_from_mode_sd", [](double mode, double sd) {
    const auto g = gamma_shape_rate_from_mode_sd(mode, sd);
    return py::make_tuple(g.shape, g.rate);
  }, py::arg("mode"), py::arg("sd"));

  // data
  py::class_<ErrorTable>(m, "ErrorTable")
      .def("__len__", [](const ErrorTable& t) { return t.records.size(); })
      .def_readonly("has_cv_column", &ErrorTable::has_cv_column)
      .def("to_csv", [](const ErrorTable& t) {
        std::ostringstream os;
        write_error_table(os, t);
        return os.str();
      });

  py::class_<ScoreMatrix>(m, "ScoreMatrix")
      .def_property_readonly("datasets", &ScoreMatrix::datasets)
      .def_property_readonly("algorithms", &ScoreMatrix::algorithms)
      .def("at", [](const ScoreMatrix& s, std::size_t d, std::size_t a) { return optional_to_py(s.at(d, a)); })
      .def("to_rows", [](const ScoreMatrix& s) {
        py::list rows;
        for (std::size_t d = 0; d < s.n_datasets(); ++d) {
          py::list row;
          for (std::size_t a = 0; a < s.n_algorithms(); ++a) row.append(optional_to_py(s.at(d, a)));
          rows.append(row);
        }
        return rows;
      });

  m.def("read_errors", [](const std::string& text) { return ingest_error_table(text); }, py::arg("text"),
        "Parse a long-form error CSV.");
  m.def("synthesize", &synthesize, py::arg("spec"), py::arg("seed"),
        "Generate an error table from a key=value synthetic spec.");
  m.def("aggregate_errors", &aggregate_errors, py::arg("table"));

  // ranks and tests
  m.def("rank_summary", [](const ScoreMatrix& s, const std::string& scheme) {
    py::list out;
    for (const auto& r : mean_rank_summary(rank_scores(s, parse_rank_scheme(scheme)))) {
      py::dict d;
      d["algorithm"] = r.algorithm;
      d["mean_rank"] = r.mean_rank;
      d["top_count"] = r.top_count;
      out.append(d);
    }
    return out;
  }, py::arg("matrix"), py::arg("scheme") = "dense");

  m.def("demsar", [](const ScoreMatrix& s, const std::string& scheme, double alpha) {
    const auto r = demsar_procedure(s, parse_rank_scheme(scheme), alpha);
    py::dict d;
    d["statistic"] = r.friedman.statistic;
    d["dof"] = r.friedman.dof;
    d["p_value"] = r.friedman.p_value;
    d["algorithms"] = r.algorithms;
    d["mean_ranks"] = r.mean_ranks;
    d["nemenyi"] = r.nemenyi ? py::object(pairwise_dict(*r.nemenyi)) : py::none();
    d["dropped_datasets"] = r.dropped_datasets;
    return d;
  }, py::arg("matrix"), py::arg("scheme") = "average", py::arg("alpha") = 0.05);

  m.def("irrelevance_threshold", [](const ErrorTable& t) {
    const auto r = irrelevance_threshold(t);
    py::dict d;
    d["median_delta_resample"] = r.median_delta_resample;
    d["median_delta_cv"] = optional_to_py(r.median_delta_cv);
    d["threshold"] = r.threshold;
    d["n_pairs_used"] = r.n_pairs_used;
    return d;
  }, py::arg("table"));

  // Bayesian ANOVA
  py::class_<McmcConfig>(m, "McmcConfig")
      .def(py::init<>())
      .def_static("desk", &McmcConfig::desk)
      .def_static("full", &McmcConfig::full)
      .def_readwrite("chains", &McmcConfig::chains)
      .def_readwrite("adaptation", &McmcConfig::adaptation)
      .def_readwrite("burn_in", &McmcConfig::burn_in)
      .def_readwrite("draws", &McmcConfig::draws)
      .def_readwrite("thin", &McmcConfig::thin)
      .def_readwrite("threads", &McmcConfig::threads);

  py::class_<PosteriorDraws>(m, "PosteriorDraws")
      .def_property_readonly("variant", [](const PosteriorDraws& p) { return to_string(p.variant()); })
      .def_property_readonly("algorithms", &PosteriorDraws::algorithms)
      .def_property_readonly("datasets", &PosteriorDraws::datasets)
      .def_property_readonly("seed", &PosteriorDraws::seed)
      .def_property_readonly("n_chains", &PosteriorDraws::n_chains)
      .def_property_readonly("n_draws_per_chain", &PosteriorDraws::n_draws_per_chain)
      .def("column_names", &PosteriorDraws::column_names)
      .def("column", [](const PosteriorDraws& p, const std::string& name) {
        const auto names = p.column_names();
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw InputError("unknown column '" + name + "'");
        return p.column(static_cast<std::size_t>(it - names.begin()));
      }, py::arg("name"), "Per-chain sequences of one column.")
      .def("rope_matrix", [](const PosteriorDraws& p, double hw) { return pairwise_dict(rope_probability_matrix(p, hw)); },
           py::arg("half_width"))
      .def("difference", &pairwise_difference_draws, py::arg("i"), py::arg("j"))
      .def("diagnose", [](const PosteriorDraws& p, bool df_correction, bool split_chains) {
        py::list out;
        for (const auto& d : diagnose(p, {df_correction, split_chains})) {
          py::dict e;
          e["name"] = d.name;
          e["rhat"] = optional_to_py(d.rhat);
          e["ess"] = optional_to_py(d.ess);
          out.append(e);
        }
        return out;
      }, py::arg("df_correction") = false, py::arg("split_chains") = false)
      .def("save", [](const PosteriorDraws& p, const std::string& path) { save_draws_file(path, p); }, py::arg("path"));

  m.def("load_draws", &load_draws_file, py::arg("path"));

  m.def("run_bayes", [](const ScoreMatrix& s, const std::string& variant, const McmcConfig& cfg,
                        std::uint64_t seed, std::optional<double> fixed_df) {
    auto spec = build_model(s, parse_variant(variant));
    if (fixed_df) spec.fixed_df = *fixed_df;
    py::gil_scoped_release release;
    return run_chains(spec, s, cfg, seed);
  }, py::arg("matrix"), py::arg("variant") = "normal", py::arg("config") = McmcConfig::desk(), py::arg("seed") = 0,
        py::arg("fixed_df") = py::none());

  m.def("psrf", [](const ChainSet& chains, bool df_correction, bool split_chains) {
    return psrf(chains, {df_correction, split_chains}).point;
  }, py::arg("chains"), py::arg("df_correction") = false, py::arg("split_chains") = false);
  m.def("effective_sample_size", &effective_sample_size, py::arg("chains"));

  m.def("posterior_predictive_check", [](const PosteriorDraws& p, const ScoreMatrix& s, std::size_t n, std::uint64_t seed) {
    const auto r = posterior_predictive_check(p, s, n, seed);
    py::dict d;
    d["p_value"] = r.p_value;
    d["t_real"] = r.t_real;
    d["t_rep"] = r.t_rep;
    d["negative_fraction"] = r.negative_fraction;
    return d;
  }, py::arg("draws"), py::arg("matrix"), py::arg("n_draws") = 1667, py::arg("seed") = 0);
}
