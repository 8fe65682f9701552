#pragma once

#include <string>
#include <vector>

#include "benchstat/data.hpp"

namespace testutil
{

/// rows[d][a] -> matrix with datasets "d00".. and algorithms "a0"..
inline benchstat::ScoreMatrix matrix_of(const std::vector<std::vector<double>>& rows)
{
  std::vector<std::string> ds;
  std::vector<std::string> as;
  for (std::size_t d = 0; d < rows.size(); ++d) ds.push_back((d < 10 ? "d0" : "d") + std::to_string(d));
  for (std::size_t a = 0; a < rows.front().size(); ++a) as.push_back("a" + std::to_string(a));
  benchstat::ScoreMatrix m(ds, as);
  for (std::size_t d = 0; d < rows.size(); ++d) {
    for (std::size_t a = 0; a < rows[d].size(); ++a) m.set(d, a, rows[d][a]);
  }
  return m;
}

inline benchstat::SynthSpec planted_spec(std::vector<double> alphas, std::size_t n_datasets,
                                         double sigma0, double delta_step = 0.001)
{
  benchstat::SynthSpec s;
  s.beta = 0.2;
  s.sigma0 = sigma0;
  s.cv_noise = sigma0;
  for (std::size_t a = 0; a < alphas.size(); ++a) s.algorithms.emplace_back("alg" + std::to_string(a), alphas[a]);
  for (std::size_t d = 0; d < n_datasets; ++d) {
    const double delta = delta_step * (static_cast<double>(d) - static_cast<double>(n_datasets) / 2.0);
    s.datasets.emplace_back("ds" + std::string(d < 10 ? "00" : d < 100 ? "0" : "") + std::to_string(d), delta);
  }
  return s;
}

}  // namespace testutil
