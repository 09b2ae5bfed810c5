#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ruelle::stats {

/// One verification result. The verdict is pass iff lower <= statistic <= upper.
struct StatReport {
  std::string test;
  /// "monte_carlo", "operator" or "diagnostic".
  std::string route;
  double statistic = 0.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool pass = false;
  /// Named auxiliary values, in insertion order.
  std::vector<std::pair<std::string, double>> values;
  std::map<std::string, std::size_t> sample_sizes;
  double runtime_seconds = 0.0;

  void add(std::string name, double v) { values.emplace_back(std::move(name), v); }
  /// Sets the statistic and the verdict.
  void judge(double stat);
  double value(const std::string& name) const;
};

double normal_cdf(double x, double sigma = 1.0);

/// sup_x |F_n(x) - Phi(x / sigma)| for the empirical law of `samples`.
double ks_normal(std::vector<double> samples, double sigma);

/// sup_x |F_n(x) - G(x)| against an arbitrary continuous CDF.
template <class Cdf>
double ks_distance(std::vector<double> samples, Cdf cdf);

double median(std::vector<double> xs);

}  // namespace ruelle::stats

#include <algorithm>
#include <cmath>

template <class Cdf>
double ruelle::stats::ks_distance(std::vector<double> samples, Cdf cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, std::abs((i + 1) / n - f), std::abs(f - i / n)});
  }
  return d;
}
