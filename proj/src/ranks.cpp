#include "benchstat/ranks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "benchstat/error.hpp"

namespace benchstat
{

RankMatrix::RankMatrix(RankScheme scheme, std::vector<std::string> datasets,
                       std::vector<std::string> algorithms)
    : scheme_(scheme),
      datasets_(std::move(datasets)),
      algorithms_(std::move(algorithms)),
      ranks_(datasets_.size() * algorithms_.size(), 0.0),
      mask_(datasets_.size() * algorithms_.size(), 0)
{
}

std::optional<double> RankMatrix::rank(std::size_t d, std::size_t a) const
{
  const auto i = d * algorithms_.size() + a;
  if (!mask_[i]) return std::nullopt;
  return ranks_[i];
}

void RankMatrix::set(std::size_t d, std::size_t a, double r)
{
  const auto i = d * algorithms_.size() + a;
  ranks_[i] = r;
  mask_[i] = 1;
}

bool RankMatrix::complete() const
{
  return std::all_of(mask_.begin(), mask_.end(), [](std::uint8_t m) { return m != 0; });
}

std::int64_t round_to_thousandths(double x)
{
  // x * 1000 carries representation error (0.1005 * 1000 = 100.49999...), so a
  // tolerance far below the rounding grid is added before flooring.
  const double scaled = x * 1000.0;
  return static_cast<std::int64_t>(std::floor(scaled + 0.5 + 1e-9 * std::max(1.0, std::abs(scaled))));
}

namespace
{

struct Entry
{
  std::size_t algorithm;
  double key;
};

std::vector<Entry> present_entries(const ScoreMatrix& m, std::size_t d, bool rounded)
{
  std::vector<Entry> out;
  for (std::size_t a = 0; a < m.n_algorithms(); ++a) {
    if (!m.present(d, a)) continue;
    const double v = m.value(d, a);
    out.push_back({a, rounded ? static_cast<double>(round_to_thousandths(v)) : v});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Entry& x, const Entry& y) { return x.key < y.key; });
  return out;
}

RankMatrix rank_impl(const ScoreMatrix& m, RankScheme scheme)
{
  RankMatrix r(scheme, m.datasets(), m.algorithms());
  for (std::size_t d = 0; d < m.n_datasets(); ++d) {
    const auto entries = present_entries(m, d, scheme == RankScheme::dense);
    if (entries.size() < 2) {
      r.warnings.push_back("dataset '" + m.datasets()[d] + "' skipped: fewer than 2 algorithms");
      continue;
    }
    if (scheme == RankScheme::dense) {
      double rank = 1.0;
      for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i > 0 && entries[i].key != entries[i - 1].key) rank += 1.0;
        r.set(d, entries[i].algorithm, rank);
      }
    } else {
      std::size_t i = 0;
      while (i < entries.size()) {
        std::size_t j = i;
        while (j + 1 < entries.size() && entries[j + 1].key == entries[i].key) ++j;
        // positions i..j (0-based) share the mean of ranks i+1..j+1
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) r.set(d, entries[t].algorithm, shared);
        i = j + 1;
      }
    }
  }
  return r;
}

}  // namespace

RankMatrix dense_ranks(const ScoreMatrix& m) { return rank_impl(m, RankScheme::dense); }

RankMatrix average_ranks(const ScoreMatrix& m) { return rank_impl(m, RankScheme::average); }

RankMatrix rank_scores(const ScoreMatrix& m, RankScheme scheme) { return rank_impl(m, scheme); }

std::vector<RankSummaryRow> mean_rank_summary(const RankMatrix& r)
{
  std::vector<RankSummaryRow> rows;
  for (std::size_t a = 0; a < r.n_algorithms(); ++a) {
    RankSummaryRow row;
    row.algorithm = r.algorithms()[a];
    double sum = 0.0;
    for (std::size_t d = 0; d < r.n_datasets(); ++d) {
      const auto rank = r.rank(d, a);
      if (!rank) continue;
      sum += *rank;
      ++row.n_datasets;
      if (*rank == 1.0) ++row.top_count;
    }
    if (row.n_datasets == 0) continue;
    row.mean_rank = sum / static_cast<double>(row.n_datasets);
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const RankSummaryRow& x, const RankSummaryRow& y) {
    if (x.mean_rank != y.mean_rank) return x.mean_rank < y.mean_rank;
    return x.algorithm < y.algorithm;
  });
  return rows;
}

RankHistogram rank_histogram(const RankMatrix& r)
{
  if (r.scheme() != RankScheme::dense) {
    throw InputError("rank histogram requires dense ranks");
  }
  RankHistogram h;
  for (std::size_t d = 0; d < r.n_datasets(); ++d) {
    for (std::size_t a = 0; a < r.n_algorithms(); ++a) {
      if (const auto rank = r.rank(d, a)) {
        h.max_rank = std::max(h.max_rank, static_cast<std::size_t>(*rank));
      }
    }
  }
  // rows follow the mean-rank ordering, which is how the heatmap is read
  for (const auto& row : mean_rank_summary(r)) {
    const auto a = static_cast<std::size_t>(
        std::find(r.algorithms().begin(), r.algorithms().end(), row.algorithm) -
        r.algorithms().begin());
    std::vector<std::size_t> counts(h.max_rank, 0);
    for (std::size_t d = 0; d < r.n_datasets(); ++d) {
      if (const auto rank = r.rank(d, a)) ++counts[static_cast<std::size_t>(*rank) - 1];
    }
    h.algorithms.push_back(row.algorithm);
    h.counts.push_back(std::move(counts));
  }
  return h;
}

void write_histogram_csv(std::ostream& out, const RankHistogram& h)
{
  out << "algorithm,rank,count\n";
  for (std::size_t a = 0; a < h.algorithms.size(); ++a) {
    for (std::size_t r = 0; r < h.max_rank; ++r) {
      out << h.algorithms[a] << ',' << (r + 1) << ',' << h.counts[a][r] << '\n';
    }
  }
}

void write_histogram_svg(std::ostream& out, const RankHistogram& h)
{
  constexpr int cell = 28;
  constexpr int left = 110;
  constexpr int top = 30;
  const int width = left + cell * static_cast<int>(h.max_rank) + 10;
  const int height = top + cell * static_cast<int>(h.algorithms.size()) + 10;
  std::size_t peak = 0;
  for (const auto& row : h.counts) {
    for (auto c : row) peak = std::max(peak, c);
  }

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t r = 0; r < h.max_rank; ++r) {
    out << "  <text x=\"" << left + cell * static_cast<int>(r) + cell / 2 << "\" y=\"" << top - 8
        << "\" text-anchor=\"middle\">" << (r + 1) << "</text>\n";
  }
  for (std::size_t a = 0; a < h.algorithms.size(); ++a) {
    const int y = top + cell * static_cast<int>(a);
    out << "  <text x=\"" << left - 6 << "\" y=\"" << y + cell / 2 + 4
        << "\" text-anchor=\"end\">" << h.algorithms[a] << "</text>\n";
    for (std::size_t r = 0; r < h.max_rank; ++r) {
      const auto c = h.counts[a][r];
      // white (0) to dark blue (peak)
      const double t = peak == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(peak);
      const int red = static_cast<int>(std::lround(255.0 * (1.0 - t)));
      const int green = static_cast<int>(std::lround(255.0 - 175.0 * t));
      const int x = left + cell * static_cast<int>(r);
      out << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\""
          << cell << "\" fill=\"rgb(" << red << ',' << green << ",255)\" stroke=\"#ccc\"/>\n";
      if (c > 0) {
        out << "  <text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
            << "\" text-anchor=\"middle\" fill=\"" << (t > 0.6 ? "white" : "black") << "\">" << c
            << "</text>\n";
      }
    }
  }
  out << "</svg>\n";
}

}  // namespace benchstat
