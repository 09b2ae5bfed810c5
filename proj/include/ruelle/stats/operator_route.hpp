#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ruelle/fit.hpp"
#include "ruelle/spectral.hpp"
#include "ruelle/stats/report.hpp"
#include "ruelle/transfer.hpp"

namespace ruelle::stats {

// Correlations here use E(g | f^{-n} B) = (L^n g) o f^n for the normalized
// operator, evaluated at the mesh nodes by tree walks and integrated with the
// equilibrium quadrature weights.

struct GreenKubo {
  double sigma2 = 0.0;
  /// C_k = <mu, g L^k g>, k = 0..n_cut.
  std::vector<double> terms;
  /// Fitted |C_k| decay rate (0 when the terms vanish exactly).
  double beta = 0.0;
  /// Geometric bound 2 |C_ncut| beta / (1 - beta) on the omitted terms.
  double tail_bound = 0.0;
  StatReport report;
};

/// sigma^2 = C_0 + 2 sum_{k=1}^{n_cut} C_k for centered g. Throws
/// NegativeVariance below -1e-8.
GreenKubo green_kubo_variance(const TransferContext& ctx, const ScalarField& g, int n_cut);

struct Correlation {
  /// C_n = <mu, g0 . g1 o f^n> - <mu, g0><mu, g1>, n = 0..n_max.
  std::vector<double> series;
  /// Empty when C_n vanishes exactly for n >= 1.
  std::optional<DecayFit> fit;
};

/// Throws DegenerateDecay when the series is nonzero but has too few points
/// above the numerical floor to fit.
Correlation correlation_decay(const TransferContext& ctx, const ScalarField& g0, const ScalarField& g1, int n_max);

struct GordinTail {
  std::vector<double> terms;         ///< a_n = <mu, (L^n g)^2>, n = 1..n_max
  std::vector<double> partial_sums;  ///< sum_{k <= n} a_k
  std::vector<double> ratios;        ///< a_{n+1} / a_n above the floor
  double limiting_ratio = 0.0;
  bool exact_zero = false;
  bool convergent = false;
};

/// Convergent when every a_n vanishes, or when the last three ratios above
/// the floor agree within 0.05 and sit below 1.
GordinTail gordin_tail(const TransferContext& ctx, const ScalarField& g, int n_max);

struct Coboundary {
  /// h = sum_{n=1}^{N} L^n g on the context mesh, shifted so <mu, h> = 0;
  /// for g = u o f - u this is u - <mu, u>.
  ScalarField h;
  std::vector<double> increments;  ///< sup_nodes |L^n g|, n = 1..N
  double residual = 0.0;           ///< sup over Julia samples of |g - (h o f - h)|
  bool converged = false;
  bool is_coboundary = false;
};

/// Throws Diverged when the increments grow.
Coboundary coboundary_solve(const TransferContext& ctx, const ScalarField& g, int n_max, double tolerance = 1e-6,
                            std::size_t samples = 256);

struct StrongCoding {
  cplx lhs;  ///< <mu, exp(i sum_l t_l g o f^l)> over the mu-weighted tree
  cplx rhs;  ///< <m, lambda^{-n} L_[i t_{n-1}] ... L_[i t_0] rho>
  double discrepancy = 0.0;
};

/// Both sides over the conformal atoms of depth `atom_depth`: the left side
/// weights each depth-n leaf a by rho(a) and evaluates g o f^l by forward
/// iteration; the right side composes the inhomogeneous operators by nested
/// recursion. Each side is normalized by its own t = 0 value.
StrongCoding asip_strong_coding_check(const PerturbedFamily& fam, const std::vector<double>& t_list,
                                      int atom_depth = 8);

}  // namespace ruelle::stats
