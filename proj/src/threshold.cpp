#include "benchstat/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "benchstat/error.hpp"

namespace benchstat
{

TopAlgorithms top_k_algorithms(const AggregatedMatrix& m, std::size_t k)
{
  if (k < 1) throw InputError("top-k selection needs k >= 1");
  TopAlgorithms top;
  for (std::size_t d = 0; d < m.n_datasets(); ++d) {
    std::vector<double> values;
    for (std::size_t a = 0; a < m.n_algorithms(); ++a) {
      if (m.present(d, a)) values.push_back(m.value(d, a));
    }
    if (values.empty()) continue;
    std::sort(values.begin(), values.end());
    const double cutoff = values[std::min(k, values.size()) - 1];
    auto& chosen = top[m.datasets()[d]];
    for (std::size_t a = 0; a < m.n_algorithms(); ++a) {
      if (m.present(d, a) && m.value(d, a) <= cutoff) chosen.insert(m.algorithms()[a]);
    }
  }
  return top;
}

namespace
{

bool selected(const TopAlgorithms& top, const std::string& dataset, const std::string& algorithm)
{
  const auto it = top.find(dataset);
  return it != top.end() && it->second.count(algorithm) > 0;
}

}  // namespace

DeltaList resample_deltas(const ErrorTable& t, const TopAlgorithms& top)
{
  // (dataset, algorithm) -> errors on both halves
  std::map<std::pair<std::string, std::string>, std::pair<std::optional<double>, std::optional<double>>>
      halves;
  for (const auto& r : t.records) {
    if (!selected(top, r.dataset, r.algorithm)) continue;
    auto& h = halves[{r.dataset, r.algorithm}];
    (r.subset == Subset::first ? h.first : h.second) = r.test_error;
  }
  DeltaList out;
  for (const auto& [dataset, algorithms] : top) {
    for (const auto& algorithm : algorithms) {
      const auto it = halves.find({dataset, algorithm});
      if (it == halves.end() || !it->second.first || !it->second.second) {
        out.warnings.push_back("skipped (" + dataset + "," + algorithm +
                               "): missing subset record");
        continue;
      }
      out.values.push_back(std::abs(*it->second.second - *it->second.first));
    }
  }
  return out;
}

DeltaList cv_deltas(const ErrorTable& t, const TopAlgorithms& top)
{
  std::vector<const ErrorRecord*> used;
  for (const auto& r : t.records) {
    if (selected(top, r.dataset, r.algorithm)) used.push_back(&r);
  }
  // canonical order so results never depend on record order
  std::sort(used.begin(), used.end(), [](const ErrorRecord* x, const ErrorRecord* y) {
    return std::tie(x->dataset, x->algorithm, x->subset) <
           std::tie(y->dataset, y->algorithm, y->subset);
  });
  DeltaList out;
  for (const auto* r : used) {
    if (!r->cv_error) {
      out.warnings.push_back("skipped (" + r->dataset + "," + r->algorithm + "," +
                             std::to_string(static_cast<int>(r->subset)) + "): missing cv_error");
      continue;
    }
    out.values.push_back(std::abs(r->test_error - *r->cv_error));
  }
  return out;
}

double median(std::vector<double> values)
{
  if (values.empty()) throw InputError("median of an empty list");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

ThresholdReport irrelevance_threshold(const ErrorTable& t, std::size_t top_k)
{
  const auto top = top_k_algorithms(aggregate_errors(t), top_k);
  ThresholdReport report;

  auto resample = resample_deltas(t, top);
  report.warnings = std::move(resample.warnings);
  if (resample.values.empty()) throw InputError("no (dataset, algorithm) pair has both subsets");
  report.n_pairs_used = resample.values.size();
  report.median_delta_resample = median(resample.values);
  report.threshold = report.median_delta_resample;

  if (t.has_cv_column) {
    auto cv = cv_deltas(t, top);
    if (!cv.values.empty()) {
      report.n_cv_records_used = cv.values.size();
      report.median_delta_cv = median(cv.values);
      report.threshold = std::min(report.threshold, *report.median_delta_cv);
    }
    if (cv.values.empty()) {
      report.warnings.push_back("no cv_error values available; threshold uses the resample median");
    } else if (!cv.warnings.empty()) {
      report.warnings.push_back(std::to_string(cv.warnings.size()) +
                                " record(s) without cv_error skipped");
    }
  } else {
    report.warnings.push_back("input has no cv_error column; threshold uses the resample median");
  }
  return report;
}

}  // namespace benchstat
