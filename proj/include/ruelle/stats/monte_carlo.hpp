#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ruelle/spectral.hpp"
#include "ruelle/stats/report.hpp"
#include "ruelle/transfer.hpp"

namespace ruelle::stats {

struct ChainOptions {
  std::size_t burn_in = 64;
};

/// Runs `num_chains` backward chains (chain c on stream c of `seed`) for
/// burn_in + length steps and hands fn(c, values) the observable along the
/// forward orbit of the final state: values[j] = g(f^j x_end), j < length.
/// Chains run in parallel; fn must only write to per-chain slots.
void for_each_orbit(const TransferContext& ctx, const ScalarField& g, std::size_t length, std::size_t num_chains,
                    std::uint64_t seed, const std::function<void(std::size_t, std::span<const double>)>& fn,
                    const ChainOptions& opts = {});

struct BirkhoffSample {
  std::string label;
  std::vector<int> n_values;
  std::size_t num_chains = 0;
  std::uint64_t seed = 0;
  /// Row-major num_chains x n_values.size().
  std::vector<double> samples;

  double at(std::size_t chain, std::size_t k) const { return samples[chain * n_values.size() + k]; }
  std::vector<double> column(std::size_t k) const;
  /// Columns chain_id, n, S_n.
  void write_csv(const std::string& path) const;
};

/// S_n(g) at mu-distributed points for each n in n_values. Requires g real
/// and centered (|<mu, g>| <= 1e-6 sup |g|).
BirkhoffSample birkhoff_sums(const TransferContext& ctx, const ScalarField& g, std::vector<int> n_values,
                             std::size_t num_chains, std::uint64_t seed, const ChainOptions& opts = {});

/// KS distance of S_n / sqrt(n) to N(0, sigma^2) for each n; the statistic
/// is the distance at the largest n, judged against `tolerance`.
StatReport clt_test(const BirkhoffSample& sample, double sigma, double tolerance = 0.02);

struct BerryEsseen {
  std::vector<double> ks;
  double slope = 0.0;
  double r_squared = 0.0;
  /// 0.87 / sqrt(num_chains), the typical KS distance of a perfect sampler.
  double noise_floor = 0.0;
  std::size_t fit_points = 0;
  /// Median of KS(4n) / KS(n) over the pairs present in the sample.
  double median_quadrupling_ratio = 0.0;
  StatReport report;
};

/// Slope of log KS_n against log n over the points above twice the noise
/// floor. Requires >= 4 n-values spanning >= 2 decades; throws
/// NoiseFloorReached when fewer than 3 points clear the floor.
BerryEsseen berry_esseen_rate(const BirkhoffSample& sample, double sigma);

/// Fejer-type kernel: the inverse Fourier transform of the triangle on
/// [-delta, delta], psi(z) = delta / sqrt(2 pi) sinc^2(delta z / 2), with
/// integral sqrt(2 pi).
double fejer_kernel(double z, double delta);

struct LcltOptions {
  double delta = 1.0;
  std::vector<double> cocycle_t = {0.5, 1.0, 2.0};
  int cocycle_steps = 40;
  ChainOptions chains;
};

struct LcltResult {
  /// a[i][k] = A_{n_i}(x_k).
  std::vector<std::vector<double>> a;
  std::vector<double> max_abs;
  StatReport report;
};

/// A_n(x) = sigma sqrt(2 pi n) E[psi(x + S_n)] - sqrt(2 pi) e^{-x^2 / (2 sigma^2 n)}
/// by Monte-Carlo. Throws CocycleFlagged if the cocycle test does not see
/// contraction at some t. The statistic is max|A| at the last n divided by
/// max|A| at the first n.
LcltResult lclt_statistic(const PerturbedFamily& fam, double sigma, std::vector<int> n_values,
                          const std::vector<double>& x_probes, std::size_t num_chains, std::uint64_t seed,
                          const LcltOptions& opts = {});

struct LilResult {
  std::vector<double> per_chain;  ///< running max of S_n / (sigma sqrt(2 n log log n))
  double median = 0.0;
  StatReport report;
};

/// Ensemble median over chains of max_{n_min <= n <= n_max} S_n / (sigma
/// sqrt(2 n log log n)); diagnostic band [0.6, 1.4].
LilResult lil_diagnostic(const TransferContext& ctx, const ScalarField& g, double sigma, std::size_t num_chains,
                         std::size_t n_min, std::size_t n_max, std::uint64_t seed, const ChainOptions& opts = {});

struct AscltResult {
  std::vector<double> probes;
  std::vector<double> log_average;  ///< (1/H_n) sum_j (1/j) 1{S_j / sqrt(j) <= t}
  std::vector<double> gaussian;
  double max_deviation = 0.0;
  StatReport report;
};

/// Log-averaged empirical CDF of S_j / sqrt(j), j <= n, along one chain
/// (stream `stream` of `seed`). H_n = sum_{j <= n} 1/j normalizes the
/// average to a probability.
AscltResult asclt_diagnostic(const TransferContext& ctx, const ScalarField& g, double sigma,
                             const std::vector<double>& t_probes, std::size_t n, std::uint64_t seed,
                             std::uint64_t stream = 0, double tolerance = 0.1, const ChainOptions& opts = {});

struct LdpPoint {
  double epsilon = 0.0;
  double probability = 0.0;   ///< fraction of chains with S_n / n > eps
  double empirical_rate = 0.0;  ///< (1/n) log probability
  double predicted_rate = 0.0;  ///< -c(eps)
  double relative_deviation = 0.0;
};

struct LdpResult {
  std::vector<LdpPoint> points;
  StatReport report;
};

/// Empirical (1/n) log P(S_n / n > eps) against -c(eps). Requires eps in
/// [0, eps_max] and n c(eps) <= log(num_chains) / 2; throws TooRare when the
/// expected count num_chains e^{-n c} is below 20. The statistic is the
/// largest relative deviation over the eps with c > 0.
LdpResult ldp_empirical(const TransferContext& ctx, const ScalarField& g, const std::function<double(double)>& c,
                        double eps_max, const std::vector<double>& eps_values, int n, std::size_t num_chains,
                        std::uint64_t seed, double tolerance = 0.2, const ChainOptions& opts = {});
LdpResult ldp_empirical(const TransferContext& ctx, const ScalarField& g, const RateFunction& rate,
                        const std::vector<double>& eps_values, int n, std::size_t num_chains, std::uint64_t seed,
                        double tolerance = 0.2, const ChainOptions& opts = {});

}  // namespace ruelle::stats
