#include "ruelle/fit.hpp"

#include <cmath>
#include <string>

#include "ruelle/error.hpp"

namespace ruelle {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  LineFit fit;
  const std::size_t n = std::min(x.size(), y.size());
  fit.points = n;
  if (n < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

DecayFit fit_decay(std::span<const double> series, const DecayFitOptions& opts) {
  DecayFit out;
  out.series.assign(series.begin(), series.end());
  std::vector<double> xs, ys;
  for (std::size_t i = opts.skip_transient; i < series.size(); ++i) {
    const double e = std::abs(series[i]);
    if (!(e > opts.floor_factor * opts.floor) || !std::isfinite(e)) break;
    if (xs.empty()) out.first_index = i + 1;
    xs.push_back(static_cast<double>(i + 1));
    ys.push_back(std::log(e));
  }
  if (xs.size() < opts.min_points) {
    throw DegenerateDecay("fit_decay: only " + std::to_string(xs.size()) +
                          " points above the numerical floor");
  }
  const LineFit line = fit_line(xs, ys);
  out.rate = std::exp(line.slope);
  out.r_squared = line.r_squared;
  out.points = xs.size();
  return out;
}

}  // namespace ruelle
