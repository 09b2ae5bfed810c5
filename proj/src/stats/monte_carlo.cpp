#include "ruelle/stats/monte_carlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

#include "ruelle/chain.hpp"
#include "ruelle/error.hpp"
#include "ruelle/io.hpp"
#include "ruelle/parallel.hpp"

namespace ruelle::stats {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr double kSqrt2Pi = 2.5066282746310002;

}  // namespace

void for_each_orbit(const TransferContext& ctx, const ScalarField& g, std::size_t length, std::size_t num_chains,
                    std::uint64_t seed, const std::function<void(std::size_t, std::span<const double>)>& fn,
                    const ChainOptions& opts) {
  parallel_for(num_chains, [&](std::size_t c) {
    BackwardChain chain(ctx, seed, c);
    for (std::size_t i = 0; i < opts.burn_in; ++i) chain.step();
    std::vector<double> values(length);
    // The k-th state is f^{length-1-k} of the last one.
    for (std::size_t k = 0; k < length; ++k) values[length - 1 - k] = g(chain.step());
    fn(c, values);
  });
}

std::vector<double> BirkhoffSample::column(std::size_t k) const {
  std::vector<double> out(num_chains);
  for (std::size_t c = 0; c < num_chains; ++c) out[c] = at(c, k);
  return out;
}

void BirkhoffSample::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("BirkhoffSample::write_csv: cannot open " + path);
  out << "chain_id,n,S_n\n";
  for (std::size_t c = 0; c < num_chains; ++c) {
    for (std::size_t k = 0; k < n_values.size(); ++k) {
      out << c << ',' << n_values[k] << ',' << format_double(at(c, k)) << '\n';
    }
  }
}

BirkhoffSample birkhoff_sums(const TransferContext& ctx, const ScalarField& g, std::vector<int> n_values,
                             std::size_t num_chains, std::uint64_t seed, const ChainOptions& opts) {
  if (g.is_complex()) throw PreconditionViolation("birkhoff_sums: observable must be real");
  if (n_values.empty() || num_chains == 0) throw PreconditionViolation("birkhoff_sums: empty request");
  std::sort(n_values.begin(), n_values.end());
  n_values.erase(std::unique(n_values.begin(), n_values.end()), n_values.end());
  if (n_values.front() < 1) throw PreconditionViolation("birkhoff_sums: n must be positive");
  require_centered(ctx, g, "birkhoff_sums");

  BirkhoffSample out;
  out.label = g.label();
  out.n_values = n_values;
  out.num_chains = num_chains;
  out.seed = seed;
  out.samples.assign(num_chains * n_values.size(), 0.0);
  const std::size_t width = n_values.size();
  for_each_orbit(
      ctx, g, static_cast<std::size_t>(n_values.back()), num_chains, seed,
      [&](std::size_t c, std::span<const double> v) {
        double s = 0.0;
        std::size_t k = 0;
        for (std::size_t j = 0; j < v.size(); ++j) {
          s += v[j];
          if (static_cast<int>(j + 1) == n_values[k]) out.samples[c * width + k++] = s;
        }
      },
      opts);
  return out;
}

StatReport clt_test(const BirkhoffSample& sample, double sigma, double tolerance) {
  if (!(sigma > 0.0)) throw PreconditionViolation("clt_test: sigma must be positive");
  const auto t0 = Clock::now();
  StatReport r;
  r.test = "clt";
  r.route = "monte_carlo";
  r.lower = 0.0;
  r.upper = tolerance;
  r.sample_sizes["chains"] = sample.num_chains;
  double last = 0.0;
  for (std::size_t k = 0; k < sample.n_values.size(); ++k) {
    auto col = sample.column(k);
    const double scale = std::sqrt(static_cast<double>(sample.n_values[k]));
    for (auto& x : col) x /= scale;
    last = ks_normal(std::move(col), sigma);
    r.add("ks_n" + std::to_string(sample.n_values[k]), last);
  }
  r.judge(last);
  r.runtime_seconds = seconds_since(t0);
  return r;
}

BerryEsseen berry_esseen_rate(const BirkhoffSample& sample, double sigma) {
  if (!(sigma > 0.0)) throw PreconditionViolation("berry_esseen_rate: sigma must be positive");
  const auto& ns = sample.n_values;
  if (ns.size() < 4 || ns.back() < 100 * ns.front()) {
    throw PreconditionViolation("berry_esseen_rate: need >= 4 n-values spanning >= 2 decades");
  }
  const auto t0 = Clock::now();
  BerryEsseen out;
  out.noise_floor = 0.87 / std::sqrt(static_cast<double>(sample.num_chains));
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    auto col = sample.column(k);
    const double scale = std::sqrt(static_cast<double>(ns[k]));
    for (auto& x : col) x /= scale;
    out.ks.push_back(ks_normal(std::move(col), sigma));
    if (out.ks.back() > 2.0 * out.noise_floor) {
      xs.push_back(std::log(static_cast<double>(ns[k])));
      ys.push_back(std::log(out.ks.back()));
    }
  }
  std::vector<double> ratios;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    for (std::size_t j = i + 1; j < ns.size(); ++j) {
      if (ns[j] == 4 * ns[i]) ratios.push_back(out.ks[j] / out.ks[i]);
    }
  }
  if (!ratios.empty()) out.median_quadrupling_ratio = median(ratios);
  out.fit_points = xs.size();
  if (xs.size() < 3) {
    throw NoiseFloorReached("berry_esseen_rate: only " + std::to_string(xs.size()) +
                            " KS values above twice the noise floor " + std::to_string(out.noise_floor));
  }
  const LineFit line = fit_line(xs, ys);
  out.slope = line.slope;
  out.r_squared = line.r_squared;
  StatReport& r = out.report;
  r.test = "berry_esseen";
  r.route = "monte_carlo";
  r.lower = -0.75;
  r.upper = -0.3;
  r.add("noise_floor", out.noise_floor);
  r.add("r_squared", line.r_squared);
  r.add("median_quadrupling_ratio", out.median_quadrupling_ratio);
  for (std::size_t k = 0; k < ns.size(); ++k) r.add("ks_n" + std::to_string(ns[k]), out.ks[k]);
  r.sample_sizes["chains"] = sample.num_chains;
  r.judge(out.slope);
  r.runtime_seconds = seconds_since(t0);
  return out;
}

double fejer_kernel(double z, double delta) {
  const double u = 0.5 * delta * z;
  const double s = u == 0.0 ? 1.0 : std::sin(u) / u;
  return delta / kSqrt2Pi * s * s;
}

LcltResult lclt_statistic(const PerturbedFamily& fam, double sigma, std::vector<int> n_values,
                          const std::vector<double>& x_probes, std::size_t num_chains, std::uint64_t seed,
                          const LcltOptions& opts) {
  if (!(sigma > 0.0)) throw PreconditionViolation("lclt_statistic: sigma must be positive");
  if (x_probes.empty()) throw PreconditionViolation("lclt_statistic: no probes");
  const auto t0 = Clock::now();
  for (const auto& c : cocycle_test(fam, opts.cocycle_t, opts.cocycle_steps)) {
    if (c.verdict != CocycleVerdict::contracting) {
      throw CocycleFlagged("lclt_statistic: L_[it] is " + std::string(to_string(c.verdict)) + " at t = " +
                           std::to_string(c.t) + "; the observable is a multiplicative-cocycle candidate");
    }
  }
  const BirkhoffSample sample =
      birkhoff_sums(fam.context(), fam.observable(), std::move(n_values), num_chains, seed, opts.chains);
  LcltResult out;
  for (std::size_t k = 0; k < sample.n_values.size(); ++k) {
    const double n = sample.n_values[k];
    std::vector<double> row;
    double worst = 0.0;
    for (double x : x_probes) {
      double acc = 0.0;
      for (std::size_t c = 0; c < sample.num_chains; ++c) acc += fejer_kernel(x + sample.at(c, k), opts.delta);
      const double mean = acc / static_cast<double>(sample.num_chains);
      const double a = sigma * std::sqrt(2.0 * std::numbers::pi * n) * mean -
                       kSqrt2Pi * std::exp(-x * x / (2.0 * sigma * sigma * n));
      row.push_back(a);
      worst = std::max(worst, std::abs(a));
    }
    out.a.push_back(std::move(row));
    out.max_abs.push_back(worst);
  }
  StatReport& r = out.report;
  r.test = "lclt";
  r.route = "monte_carlo";
  r.lower = 0.0;
  r.upper = 0.5;
  for (std::size_t k = 0; k < sample.n_values.size(); ++k) {
    r.add("max_abs_A_n" + std::to_string(sample.n_values[k]), out.max_abs[k]);
  }
  r.add("delta", opts.delta);
  r.sample_sizes["chains"] = num_chains;
  r.judge(out.max_abs.back() / out.max_abs.front());
  r.runtime_seconds = seconds_since(t0);
  return out;
}

LilResult lil_diagnostic(const TransferContext& ctx, const ScalarField& g, double sigma, std::size_t num_chains,
                         std::size_t n_min, std::size_t n_max, std::uint64_t seed, const ChainOptions& opts) {
  if (!(sigma > 0.0)) throw PreconditionViolation("lil_diagnostic: sigma must be positive");
  if (n_min < 16 || n_max < n_min) throw PreconditionViolation("lil_diagnostic: need 16 <= n_min <= n_max");
  require_centered(ctx, g, "lil_diagnostic");
  const auto t0 = Clock::now();
  LilResult out;
  out.per_chain.assign(num_chains, 0.0);
  for_each_orbit(
      ctx, g, n_max, num_chains, seed,
      [&](std::size_t c, std::span<const double> v) {
        double s = 0.0, best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < v.size(); ++j) {
          s += v[j];
          const std::size_t n = j + 1;
          if (n < n_min) continue;
          const double nd = static_cast<double>(n);
          best = std::max(best, s / (sigma * std::sqrt(2.0 * nd * std::log(std::log(nd)))));
        }
        out.per_chain[c] = best;
      },
      opts);
  out.median = median(out.per_chain);
  StatReport& r = out.report;
  r.test = "lil";
  r.route = "diagnostic";
  r.lower = 0.6;
  r.upper = 1.4;
  r.sample_sizes["chains"] = num_chains;
  r.sample_sizes["n_min"] = n_min;
  r.sample_sizes["n_max"] = n_max;
  r.judge(out.median);
  r.runtime_seconds = seconds_since(t0);
  return out;
}

AscltResult asclt_diagnostic(const TransferContext& ctx, const ScalarField& g, double sigma,
                             const std::vector<double>& t_probes, std::size_t n, std::uint64_t seed,
                             std::uint64_t stream, double tolerance, const ChainOptions& opts) {
  if (!(sigma > 0.0)) throw PreconditionViolation("asclt_diagnostic: sigma must be positive");
  if (n < 2 || t_probes.empty()) throw PreconditionViolation("asclt_diagnostic: need n >= 2 and probes");
  require_centered(ctx, g, "asclt_diagnostic");
  const auto t0 = Clock::now();
  BackwardChain chain(ctx, seed, stream);
  for (std::size_t i = 0; i < opts.burn_in; ++i) chain.step();
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[n - 1 - k] = g(chain.step());

  AscltResult out;
  out.probes = t_probes;
  std::vector<double> acc(t_probes.size(), 0.0);
  double harmonic = 0.0, s = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    s += v[j - 1];
    const double w = 1.0 / static_cast<double>(j);
    harmonic += w;
    const double z = s / std::sqrt(static_cast<double>(j));
    for (std::size_t p = 0; p < t_probes.size(); ++p) {
      if (z <= t_probes[p]) acc[p] += w;
    }
  }
  for (std::size_t p = 0; p < t_probes.size(); ++p) {
    out.log_average.push_back(acc[p] / harmonic);
    out.gaussian.push_back(normal_cdf(t_probes[p], sigma));
    out.max_deviation = std::max(out.max_deviation, std::abs(out.log_average.back() - out.gaussian.back()));
  }
  StatReport& r = out.report;
  r.test = "asclt";
  r.route = "diagnostic";
  r.lower = 0.0;
  r.upper = tolerance;
  for (std::size_t p = 0; p < t_probes.size(); ++p) {
    r.add("log_average_t" + format_double(t_probes[p]), out.log_average[p]);
  }
  r.sample_sizes["n"] = n;
  r.judge(out.max_deviation);
  r.runtime_seconds = seconds_since(t0);
  return out;
}

LdpResult ldp_empirical(const TransferContext& ctx, const ScalarField& g, const std::function<double(double)>& c,
                        double eps_max, const std::vector<double>& eps_values, int n, std::size_t num_chains,
                        std::uint64_t seed, double tolerance, const ChainOptions& opts) {
  if (n < 1 || num_chains == 0 || eps_values.empty()) throw PreconditionViolation("ldp_empirical: empty request");
  const auto t0 = Clock::now();
  const double budget = std::log(static_cast<double>(num_chains)) / 2.0;
  LdpResult out;
  for (double eps : eps_values) {
    if (eps < 0.0 || eps > eps_max) {
      throw PreconditionViolation("ldp_empirical: eps = " + std::to_string(eps) + " outside [0, " +
                                  std::to_string(eps_max) + "]");
    }
    const double rate = c(eps);
    if (static_cast<double>(num_chains) * std::exp(-n * rate) < 20.0) {
      throw TooRare("ldp_empirical: expected count below 20 at eps = " + std::to_string(eps));
    }
    if (n * rate > budget) {
      throw PreconditionViolation("ldp_empirical: n c(eps) exceeds log(num_chains) / 2 at eps = " +
                                  std::to_string(eps));
    }
    out.points.push_back({eps, 0.0, 0.0, -rate, 0.0});
  }
  const BirkhoffSample sample = birkhoff_sums(ctx, g, {n}, num_chains, seed, opts);
  StatReport& r = out.report;
  r.test = "ldp";
  r.route = "monte_carlo";
  r.lower = 0.0;
  r.upper = tolerance;
  double worst = 0.0;
  for (auto& p : out.points) {
    std::size_t count = 0;
    for (double s : sample.samples) count += s / n > p.epsilon;
    p.probability = static_cast<double>(count) / static_cast<double>(num_chains);
    p.empirical_rate = std::log(p.probability) / n;
    if (p.predicted_rate < 0.0) {
      p.relative_deviation = std::abs(p.empirical_rate - p.predicted_rate) / std::abs(p.predicted_rate);
      worst = std::max(worst, p.relative_deviation);
    }
    const std::string tag = "_eps" + format_double(p.epsilon);
    r.add("empirical_rate" + tag, p.empirical_rate);
    r.add("predicted_rate" + tag, p.predicted_rate);
  }
  r.sample_sizes["chains"] = num_chains;
  r.sample_sizes["n"] = static_cast<std::size_t>(n);
  r.judge(worst);
  r.runtime_seconds = seconds_since(t0);
  return out;
}

LdpResult ldp_empirical(const TransferContext& ctx, const ScalarField& g, const RateFunction& rate,
                        const std::vector<double>& eps_values, int n, std::size_t num_chains, std::uint64_t seed,
                        double tolerance, const ChainOptions& opts) {
  const double eps_max = rate.lambda.back() / rate.theta.back();
  return ldp_empirical(
      ctx, g, [&](double e) { return rate.legendre(e); }, eps_max, eps_values, n, num_chains, seed, tolerance, opts);
}

}  // namespace ruelle::stats
