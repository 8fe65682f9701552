#include "benchstat/data.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "benchstat/error.hpp"
#include "benchstat/rng.hpp"
#include "text_util.hpp"

namespace benchstat
{

using detail::parse_double;
using detail::parse_int;
using detail::split;
using detail::trim;

// ---------------------------------------------------------------------------
// ScoreMatrix

ScoreMatrix::ScoreMatrix(std::vector<std::string> datasets, std::vector<std::string> algorithms)
    : datasets_(std::move(datasets)),
      algorithms_(std::move(algorithms)),
      values_(datasets_.size() * algorithms_.size(), 0.0),
      mask_(datasets_.size() * algorithms_.size(), 0)
{
}

std::optional<double> ScoreMatrix::at(std::size_t d, std::size_t a) const
{
  const auto i = index(d, a);
  if (!mask_[i]) return std::nullopt;
  return values_[i];
}

void ScoreMatrix::set(std::size_t d, std::size_t a, double v)
{
  const auto i = index(d, a);
  values_[i] = v;
  mask_[i] = 1;
}

void ScoreMatrix::clear(std::size_t d, std::size_t a)
{
  const auto i = index(d, a);
  values_[i] = 0.0;
  mask_[i] = 0;
}

std::size_t ScoreMatrix::n_present() const
{
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

std::size_t ScoreMatrix::n_present_in_row(std::size_t d) const
{
  std::size_t n = 0;
  for (std::size_t a = 0; a < algorithms_.size(); ++a) n += mask_[index(d, a)];
  return n;
}

std::size_t ScoreMatrix::algorithm_index(std::string_view name) const
{
  const auto it = std::find(algorithms_.begin(), algorithms_.end(), name);
  if (it == algorithms_.end()) throw InputError("unknown algorithm '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - algorithms_.begin());
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace
{

std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

/// Feeds every data row (after the header) to `on_row`. Blank lines and lines
/// starting with '#' are skipped. Returns the index of the matched header.
template <typename OnRow>
std::size_t read_csv(std::istream& in, const std::vector<std::string_view>& headers, OnRow on_row)
{
  std::string raw;
  std::size_t line_no = 0;
  std::optional<std::size_t> header;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      for (std::size_t h = 0; h < headers.size(); ++h) {
        if (line == headers[h]) header = h;
      }
      if (!header) {
        throw InputError(line_prefix(line_no) + "unexpected header '" + std::string(line) +
                         "', expected '" + std::string(headers.front()) + "'");
      }
      continue;
    }
    on_row(*header, line_no, split(line, ','));
  }
  if (!header) throw InputError("empty input: no header line found");
  return *header;
}

Subset parse_subset(std::string_view field, std::size_t line_no)
{
  const auto v = parse_int(field);
  if (!v || (*v != 1 && *v != 2)) {
    throw InputError(line_prefix(line_no) + "unknown subset value '" + std::string(trim(field)) +
                     "'");
  }
  return *v == 1 ? Subset::first : Subset::second;
}

double parse_fraction(std::string_view field, std::string_view what, std::size_t line_no)
{
  const auto v = parse_double(field);
  if (!v || !std::isfinite(*v)) {
    throw InputError(line_prefix(line_no) + "malformed " + std::string(what) + " '" +
                     std::string(trim(field)) + "'");
  }
  if (*v < 0.0 || *v > 1.0) {
    throw InputError(line_prefix(line_no) + std::string(what) + " " + std::string(trim(field)) +
                     " outside [0,1]");
  }
  return *v;
}

double parse_seconds(std::string_view field, std::string_view what, std::size_t line_no)
{
  const auto v = parse_double(field);
  if (!v || !std::isfinite(*v)) {
    throw InputError(line_prefix(line_no) + "malformed " + std::string(what) + " '" +
                     std::string(trim(field)) + "'");
  }
  if (*v < 0.0) throw InputError(line_prefix(line_no) + "negative time in " + std::string(what));
  return *v;
}

std::string identifier(std::string_view field, std::string_view what, std::size_t line_no)
{
  const auto id = trim(field);
  if (id.empty()) throw InputError(line_prefix(line_no) + "empty " + std::string(what));
  return std::string(id);
}

using Key = std::tuple<std::string, std::string, Subset>;

void check_unique(std::map<Key, std::size_t>& seen, Key key, std::size_t line_no)
{
  const auto [it, inserted] = seen.emplace(key, line_no);
  if (!inserted) {
    throw InputError(line_prefix(line_no) + "duplicate key (" + std::get<0>(key) + "," +
                     std::get<1>(key) + "," +
                     std::to_string(static_cast<int>(std::get<2>(key))) +
                     "), first seen on line " + std::to_string(it->second));
  }
}

}  // namespace

ErrorTable ingest_error_table(std::istream& in)
{
  ErrorTable table;
  std::map<Key, std::size_t> seen;
  const std::vector<std::string_view> headers{"dataset,algorithm,subset,test_error,cv_error",
                                              "dataset,algorithm,subset,test_error"};
  const auto header = read_csv(in, headers, [&](std::size_t h, std::size_t line_no,
                                                const std::vector<std::string_view>& f) {
    const std::size_t expected = h == 0 ? 5 : 4;
    if (f.size() != expected) {
      throw InputError(line_prefix(line_no) + "malformed row: expected " +
                       std::to_string(expected) + " fields, got " + std::to_string(f.size()));
    }
    ErrorRecord r;
    r.dataset = identifier(f[0], "dataset", line_no);
    r.algorithm = identifier(f[1], "algorithm", line_no);
    r.subset = parse_subset(f[2], line_no);
    r.test_error = parse_fraction(f[3], "test_error", line_no);
    if (h == 0 && !trim(f[4]).empty()) r.cv_error = parse_fraction(f[4], "cv_error", line_no);
    check_unique(seen, Key{r.dataset, r.algorithm, r.subset}, line_no);
    table.records.push_back(std::move(r));
  });
  table.has_cv_column = header == 0;
  return table;
}

ErrorTable ingest_error_table(std::string_view text)
{
  std::istringstream in{std::string(text)};
  return ingest_error_table(in);
}

TimingTable ingest_timing_table(std::istream& in)
{
  TimingTable table;
  std::map<Key, std::size_t> seen;
  const std::vector<std::string_view> headers{
      "dataset,algorithm,subset,train_test_seconds,hyper_search_seconds,n_hyper_combos"};
  read_csv(in, headers, [&](std::size_t, std::size_t line_no,
                            const std::vector<std::string_view>& f) {
    if (f.size() != 6) {
      throw InputError(line_prefix(line_no) + "malformed row: expected 6 fields, got " +
                       std::to_string(f.size()));
    }
    TimingRecord r;
    r.dataset = identifier(f[0], "dataset", line_no);
    r.algorithm = identifier(f[1], "algorithm", line_no);
    r.subset = parse_subset(f[2], line_no);
    r.train_test_seconds = parse_seconds(f[3], "train_test_seconds", line_no);
    r.hyper_search_seconds = parse_seconds(f[4], "hyper_search_seconds", line_no);
    const auto combos = parse_int(f[5]);
    if (!combos) {
      throw InputError(line_prefix(line_no) + "malformed n_hyper_combos '" +
                       std::string(trim(f[5])) + "'");
    }
    if (*combos < 1) throw InputError(line_prefix(line_no) + "n_hyper_combos must be >= 1");
    r.n_hyper_combos = *combos;
    check_unique(seen, Key{r.dataset, r.algorithm, r.subset}, line_no);
    table.records.push_back(std::move(r));
  });
  return table;
}

TimingTable ingest_timing_table(std::string_view text)
{
  std::istringstream in{std::string(text)};
  return ingest_timing_table(in);
}

// ---------------------------------------------------------------------------
// Aggregation and validation

namespace
{

template <typename Records>
std::pair<std::vector<std::string>, std::vector<std::string>> sorted_labels(const Records& records)
{
  std::set<std::string> datasets;
  std::set<std::string> algorithms;
  for (const auto& r : records) {
    datasets.insert(r.dataset);
    algorithms.insert(r.algorithm);
  }
  return {{datasets.begin(), datasets.end()}, {algorithms.begin(), algorithms.end()}};
}

std::size_t position(const std::vector<std::string>& sorted, const std::string& key)
{
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), key) -
                                  sorted.begin());
}

}  // namespace

AggregatedMatrix aggregate_errors(const ErrorTable& table)
{
  auto [datasets, algorithms] = sorted_labels(table.records);
  const std::size_t n_alg = algorithms.size();
  std::vector<std::optional<double>> first(datasets.size() * n_alg);
  std::vector<std::optional<double>> second(datasets.size() * n_alg);
  for (const auto& r : table.records) {
    const auto i = position(datasets, r.dataset) * n_alg + position(algorithms, r.algorithm);
    (r.subset == Subset::first ? first : second)[i] = r.test_error;
  }
  AggregatedMatrix m(std::move(datasets), std::move(algorithms));
  for (std::size_t d = 0; d < m.n_datasets(); ++d) {
    for (std::size_t a = 0; a < n_alg; ++a) {
      const auto i = d * n_alg + a;
      if (first[i] && second[i]) m.set(d, a, (*first[i] + *second[i]) / 2.0);
    }
  }
  return m;
}

ValidationReport validate_matrix(const ScoreMatrix& m, MissingPolicy policy)
{
  ValidationReport report;
  std::vector<std::size_t> per_alg(m.n_algorithms(), 0);
  for (std::size_t d = 0; d < m.n_datasets(); ++d) {
    std::size_t row_missing = 0;
    for (std::size_t a = 0; a < m.n_algorithms(); ++a) {
      if (m.present(d, a)) continue;
      report.missing.push_back({m.datasets()[d], m.algorithms()[a]});
      ++per_alg[a];
      ++row_missing;
    }
    if (row_missing > 0) report.missing_per_dataset.emplace_back(m.datasets()[d], row_missing);
  }
  for (std::size_t a = 0; a < m.n_algorithms(); ++a) {
    if (per_alg[a] > 0) report.missing_per_algorithm.emplace_back(m.algorithms()[a], per_alg[a]);
  }
  if (policy == MissingPolicy::require_complete && !report.complete()) {
    std::string msg = "incomplete matrix: " + std::to_string(report.missing.size()) +
                      " missing cell(s):";
    for (const auto& c : report.missing) msg += " (" + c.dataset + "," + c.algorithm + ")";
    throw InputError(msg);
  }
  return report;
}

ScoreMatrix timing_matrix(const TimingTable& table, TimingMetric metric)
{
  std::set<std::string> subjects;
  std::set<std::string> algorithm_set;
  const auto label = [](const TimingRecord& r) {
    return r.dataset + "#" + std::to_string(static_cast<int>(r.subset));
  };
  for (const auto& r : table.records) {
    subjects.insert(label(r));
    algorithm_set.insert(r.algorithm);
  }
  std::vector<std::string> rows(subjects.begin(), subjects.end());
  std::vector<std::string> algorithms(algorithm_set.begin(), algorithm_set.end());
  ScoreMatrix m(rows, algorithms);
  for (const auto& r : table.records) {
    const double v =
        metric == TimingMetric::one_train_test ? r.train_test_seconds : r.per_hyper_seconds();
    m.set(position(rows, label(r)), position(algorithms, r.algorithm), v);
  }
  return m;
}

ScoreMatrix complete_cases(const ScoreMatrix& m, std::vector<std::string>* dropped)
{
  std::vector<std::size_t> keep;
  for (std::size_t d = 0; d < m.n_datasets(); ++d) {
    if (m.n_present_in_row(d) == m.n_algorithms()) {
      keep.push_back(d);
    } else if (dropped) {
      dropped->push_back(m.datasets()[d]);
    }
  }
  std::vector<std::string> rows;
  for (auto d : keep) rows.push_back(m.datasets()[d]);
  ScoreMatrix out(std::move(rows), m.algorithms());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (std::size_t a = 0; a < m.n_algorithms(); ++a) out.set(i, a, m.value(keep[i], a));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic data

ErrorTable generate_synthetic(const SynthSpec& spec, std::uint64_t seed)
{
  if (!(spec.sigma0 >= 0.0) || !(spec.cv_noise >= 0.0)) {
    throw InputError("synthetic noise scales must be non-negative");
  }
  if (spec.algorithms.empty() || spec.datasets.empty()) {
    throw InputError("synthetic spec needs at least one algorithm and one dataset");
  }
  auto rng = make_stream(seed, 0);
  std::normal_distribution<double> unit(0.0, 1.0);
  const auto clamp01 = [](double x) { return std::clamp(x, 0.0, 1.0); };

  ErrorTable table;
  table.has_cv_column = true;
  for (const auto& [dataset, delta] : spec.datasets) {
    for (const auto& [algorithm, alpha] : spec.algorithms) {
      for (const Subset s : {Subset::first, Subset::second}) {
        // Draws are consumed unconditionally so that zero-noise specs keep
        // the same stream layout as noisy ones.
        const double noise = unit(rng);
        const double cv_noise = unit(rng);
        ErrorRecord r;
        r.dataset = dataset;
        r.algorithm = algorithm;
        r.subset = s;
        r.test_error = clamp01(spec.beta + alpha + delta + spec.sigma0 * noise);
        r.cv_error = clamp01(r.test_error + spec.cv_noise * cv_noise);
        table.records.push_back(std::move(r));
      }
    }
  }
  return table;
}

namespace
{

std::vector<std::pair<std::string, double>> parse_named_values(std::string_view value,
                                                               std::string_view key)
{
  std::vector<std::pair<std::string, double>> out;
  for (auto item : split(value, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.rfind(':');
    if (colon == std::string_view::npos) {
      throw InputError("synth spec: '" + std::string(key) + "' entries must be name:value");
    }
    const auto v = parse_double(item.substr(colon + 1));
    if (!v) throw InputError("synth spec: malformed number in '" + std::string(item) + "'");
    out.emplace_back(std::string(trim(item.substr(0, colon))), *v);
  }
  return out;
}

}  // namespace

SynthSpec parse_synth_spec(std::istream& in)
{
  SynthSpec spec;
  spec.algorithms.clear();
  std::optional<std::int64_t> n_datasets;
  double delta_sd = 0.1;
  std::uint64_t delta_seed = 0;
  bool explicit_datasets = false;

  std::string raw;
  while (std::getline(in, raw)) {
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("synth spec: expected key=value, got '" + std::string(line) + "'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto number = [&]() {
      const auto v = parse_double(value);
      if (!v) throw InputError("synth spec: malformed number for '" + std::string(key) + "'");
      return *v;
    };
    if (key == "beta") {
      spec.beta = number();
    } else if (key == "sigma0") {
      spec.sigma0 = number();
    } else if (key == "cv_noise") {
      spec.cv_noise = number();
    } else if (key == "algorithms") {
      spec.algorithms = parse_named_values(value, key);
    } else if (key == "datasets") {
      spec.datasets = parse_named_values(value, key);
      explicit_datasets = true;
    } else if (key == "n_datasets") {
      n_datasets = parse_int(value);
      if (!n_datasets || *n_datasets < 1) throw InputError("synth spec: n_datasets must be >= 1");
    } else if (key == "delta_sd") {
      delta_sd = number();
    } else if (key == "delta_seed") {
      const auto v = parse_int(value);
      if (!v || *v < 0) throw InputError("synth spec: delta_seed must be a non-negative integer");
      delta_seed = static_cast<std::uint64_t>(*v);
    } else {
      throw InputError("synth spec: unknown key '" + std::string(key) + "'");
    }
  }
  if (!explicit_datasets && n_datasets) {
    auto rng = make_stream(delta_seed, 1);
    std::normal_distribution<double> delta(0.0, delta_sd);
    for (std::int64_t i = 0; i < *n_datasets; ++i) {
      spec.datasets.emplace_back("d" + std::to_string(i + 1), delta(rng));
    }
  }
  if (spec.algorithms.empty()) throw InputError("synth spec: no algorithms given");
  if (spec.datasets.empty()) throw InputError("synth spec: no datasets given");
  if (spec.sigma0 < 0.0) throw InputError("synth spec: sigma0 must be non-negative");
  return spec;
}

std::string render_synth_spec(const SynthSpec& spec)
{
  const auto join = [](const std::vector<std::pair<std::string, double>>& items) {
    std::string s;
    for (const auto& [name, v] : items) {
      if (!s.empty()) s += ',';
      s += name + ':' + detail::format_roundtrip(v);
    }
    return s;
  };
  std::string out;
  out += "beta=" + detail::format_roundtrip(spec.beta) + "\n";
  out += "sigma0=" + detail::format_roundtrip(spec.sigma0) + "\n";
  out += "cv_noise=" + detail::format_roundtrip(spec.cv_noise) + "\n";
  out += "algorithms=" + join(spec.algorithms) + "\n";
  out += "datasets=" + join(spec.datasets) + "\n";
  return out;
}

void write_error_table(std::ostream& out, const ErrorTable& table)
{
  out << (table.has_cv_column ? "dataset,algorithm,subset,test_error,cv_error\n"
                              : "dataset,algorithm,subset,test_error\n");
  for (const auto& r : table.records) {
    out << r.dataset << ',' << r.algorithm << ',' << static_cast<int>(r.subset) << ','
        << detail::format_roundtrip(r.test_error);
    if (table.has_cv_column) {
      out << ',';
      if (r.cv_error) out << detail::format_roundtrip(*r.cv_error);
    }
    out << '\n';
  }
}

}  // namespace benchstat
