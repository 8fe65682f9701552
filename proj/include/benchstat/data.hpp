#pragma once

// Benchmark measurement tables: ingestion, validation, aggregation and
// synthetic generation.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace benchstat
{

/// Which half of a dataset the algorithm was trained on.
enum class Subset : std::uint8_t
{
  first = 1,
  second = 2
};

struct ErrorRecord
{
  std::string dataset;
  std::string algorithm;
  Subset subset = Subset::first;
  double test_error = 0.0;          ///< trained on `subset`, tested on the other half
  std::optional<double> cv_error;   ///< inner CV estimate at the selected hyperparameters
};

struct ErrorTable
{
  std::vector<ErrorRecord> records;
  bool has_cv_column = true;
};

struct TimingRecord
{
  std::string dataset;
  std::string algorithm;
  Subset subset = Subset::first;
  double train_test_seconds = 0.0;
  double hyper_search_seconds = 0.0;
  std::int64_t n_hyper_combos = 1;

  double per_hyper_seconds() const
  {
    return hyper_search_seconds / static_cast<double>(n_hyper_combos);
  }
};

struct TimingTable
{
  std::vector<TimingRecord> records;
};

enum class TimingMetric
{
  one_train_test,
  per_hyper
};

/// Row × algorithm grid of optional scores, lower is better.
///
/// For error analyses each row is a dataset and each cell holds the
/// mean error over both halves. For timing analyses each
/// row is a (dataset, subset) subject. Rows and algorithms are kept in
/// lexicographic order so that results never depend on record order.
class ScoreMatrix
{
public:
  ScoreMatrix() = default;
  ScoreMatrix(std::vector<std::string> datasets, std::vector<std::string> algorithms);

  std::size_t n_datasets() const { return datasets_.size(); }
  std::size_t n_algorithms() const { return algorithms_.size(); }
  const std::vector<std::string>& datasets() const { return datasets_; }
  const std::vector<std::string>& algorithms() const { return algorithms_; }

  bool present(std::size_t d, std::size_t a) const { return mask_[index(d, a)] != 0; }
  std::optional<double> at(std::size_t d, std::size_t a) const;
  /// Value of a cell known to be present.
  double value(std::size_t d, std::size_t a) const { return values_[index(d, a)]; }

  void set(std::size_t d, std::size_t a, double v);
  void clear(std::size_t d, std::size_t a);

  std::size_t n_present() const;
  std::size_t n_present_in_row(std::size_t d) const;

  /// Index of an algorithm; throws InputError if unknown.
  std::size_t algorithm_index(std::string_view name) const;

private:
  std::size_t index(std::size_t d, std::size_t a) const { return d * algorithms_.size() + a; }

  std::vector<std::string> datasets_;
  std::vector<std::string> algorithms_;
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
};

using AggregatedMatrix = ScoreMatrix;

struct MissingCell
{
  std::string dataset;
  std::string algorithm;
};

struct ValidationReport
{
  std::vector<MissingCell> missing;
  std::vector<std::pair<std::string, std::size_t>> missing_per_algorithm;  // only nonzero
  std::vector<std::pair<std::string, std::size_t>> missing_per_dataset;    // only nonzero

  bool complete() const { return missing.empty(); }
};

enum class MissingPolicy
{
  require_complete,
  allow_missing
};

ErrorTable ingest_error_table(std::istream& in);
ErrorTable ingest_error_table(std::string_view text);

TimingTable ingest_timing_table(std::istream& in);
TimingTable ingest_timing_table(std::string_view text);

AggregatedMatrix aggregate_errors(const ErrorTable& table);

/// Throws InputError listing every missing cell under require_complete.
ValidationReport validate_matrix(const ScoreMatrix& m, MissingPolicy policy);

/// Subjects are (dataset, subset) pairs, labelled "dataset#subset".
ScoreMatrix timing_matrix(const TimingTable& table, TimingMetric metric);

/// Drops every row with a missing cell. Returns the names of dropped rows.
ScoreMatrix complete_cases(const ScoreMatrix& m, std::vector<std::string>* dropped = nullptr);

/// Ingredients of a synthetic error table: planted effects and noise scales.
struct SynthSpec
{
  double beta = 0.2;
  std::vector<std::pair<std::string, double>> algorithms;  // name, alpha
  std::vector<std::pair<std::string, double>> datasets;    // name, delta
  double sigma0 = 0.01;    ///< per-subset test-error noise
  double cv_noise = 0.0;   ///< sd of cv_error around test_error
};

/// Per-subset test errors are clamp(beta + alpha + delta + N(0, sigma0));
/// cv_error = clamp(test_error + N(0, cv_noise)). Deterministic for a seed.
ErrorTable generate_synthetic(const SynthSpec& spec, std::uint64_t seed);

/// Parses a key=value synth spec. Keys: beta, sigma0, cv_noise,
/// algorithms=name:alpha,..., and either datasets=name:delta,... or
/// n_datasets + delta_sd (+ optional delta_seed) to draw deltas.
SynthSpec parse_synth_spec(std::istream& in);
std::string render_synth_spec(const SynthSpec& spec);

/// Long-form CSV writer; numbers use the shortest round-trip representation.
void write_error_table(std::ostream& out, const ErrorTable& table);

}  // namespace benchstat
