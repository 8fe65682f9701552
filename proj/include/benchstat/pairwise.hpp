#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace benchstat
{

enum class PairwiseKind
{
  nemenyi_p,
  rope_prob
};

/// Symmetric algorithm × algorithm matrix with an empty diagonal.
class PairwiseMatrix
{
public:
  PairwiseMatrix(PairwiseKind kind, std::vector<std::string> algorithms)
      : kind_(kind), algorithms_(std::move(algorithms)), values_(algorithms_.size() * algorithms_.size(), 0.0)
  {
  }

  PairwiseKind kind() const { return kind_; }
  const std::vector<std::string>& algorithms() const { return algorithms_; }
  std::size_t size() const { return algorithms_.size(); }

  std::optional<double> at(std::size_t i, std::size_t j) const
  {
    if (i == j) return std::nullopt;
    return values_[i * size() + j];
  }

  /// Sets both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double v)
  {
    values_[i * size() + j] = v;
    values_[j * size() + i] = v;
  }

private:
  PairwiseKind kind_;
  std::vector<std::string> algorithms_;
  std::vector<double> values_;
};

}  // namespace benchstat
