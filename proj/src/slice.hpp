#pragma once

// Univariate slice sampler with stepping out and shrinkage.

#include <algorithm>
#include <cmath>
#include <random>

#include "benchstat/rng.hpp"

namespace benchstat::detail
{

class SliceSampler
{
public:
  SliceSampler(double width, double lo, double hi) : width_(width), lo_(lo), hi_(hi) {}

  double width() const { return width_; }

  /// While adapting, the width tracks twice the mean jump size.
  void set_adapting(bool on) { adapting_ = on; }

  template <typename LogDensity>
  double sample(double x0, const LogDensity& log_f, Rng& rng)
  {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    const double level = log_f(x0) - expo(rng);

    double left = x0 - width_ * unit(rng);
    double right = left + width_;
    // stepping out with the step budget split at random between both sides
    int left_steps = static_cast<int>(std::floor(max_steps * unit(rng)));
    int right_steps = max_steps - 1 - left_steps;
    while (left_steps-- > 0 && left > lo_ && log_f(left) > level) left -= width_;
    while (right_steps-- > 0 && right < hi_ && log_f(right) > level) right += width_;
    left = std::max(left, lo_);
    right = std::min(right, hi_);

    double x1 = x0;
    for (int tries = 0; tries < max_shrink; ++tries) {
      x1 = left + (right - left) * unit(rng);
      if (x1 > lo_ && x1 < hi_ && log_f(x1) > level) break;
      if (x1 < x0) {
        left = x1;
      } else {
        right = x1;
      }
      x1 = x0;
    }

    if (adapting_) {
      ++n_jumps_;
      mean_jump_ += (std::abs(x1 - x0) - mean_jump_) / static_cast<double>(n_jumps_);
      if (n_jumps_ >= 10 && mean_jump_ > 0.0) width_ = 2.0 * mean_jump_;
    }
    return x1;
  }

private:
  static constexpr int max_steps = 50;
  static constexpr int max_shrink = 200;

  double width_;
  double lo_;
  double hi_;
  bool adapting_ = false;
  long n_jumps_ = 0;
  double mean_jump_ = 0.0;
};

}  // namespace benchstat::detail
