#include "ruelle/stats/report.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ruelle/error.hpp"

namespace ruelle::stats {

void StatReport::judge(double stat) {
  statistic = stat;
  pass = std::isfinite(stat) && stat >= lower && stat <= upper;
}

double StatReport::value(const std::string& name) const {
  for (const auto& [k, v] : values) {
    if (k == name) return v;
  }
  throw InputError("StatReport: no value named '" + name + "'");
}

double normal_cdf(double x, double sigma) { return 0.5 * std::erfc(-x / (sigma * std::numbers::sqrt2)); }

double ks_normal(std::vector<double> samples, double sigma) {
  return ks_distance(std::move(samples), [sigma](double x) { return normal_cdf(x, sigma); });
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw PreconditionViolation("median of an empty set");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace ruelle::stats
