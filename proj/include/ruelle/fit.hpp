#pragma once

#include <span>
#include <vector>

namespace ruelle {

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Exponential decay rate of a series e_1, e_2, ... (index n = position + 1).
struct DecayFit {
  double rate = 0.0;  ///< exp(slope of log e_n)
  double r_squared = 0.0;
  std::size_t first_index = 0;  ///< n of the first point used
  std::size_t points = 0;
  std::vector<double> series;
};

struct DecayFitOptions {
  std::size_t skip_transient = 2;
  /// Points at or below floor_factor * floor are dropped, as is everything
  /// after the first such point.
  double floor = 1e-13;
  double floor_factor = 10.0;
  std::size_t min_points = 5;
};

/// Fits log e_n = a + n log(rate) over the linear regime. Throws
/// DegenerateDecay when fewer than min_points remain.
DecayFit fit_decay(std::span<const double> series, const DecayFitOptions& opts = {});

}  // namespace ruelle
