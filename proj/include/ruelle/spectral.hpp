#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ruelle/collocation.hpp"
#include "ruelle/fit.hpp"
#include "ruelle/transfer.hpp"

namespace ruelle {

/// g - <mu, g> together with the removed mean.
struct CenteredField {
  ScalarField field;
  double mean = 0.0;
};
CenteredField center_equilibrium(const TransferContext& ctx, const ScalarField& g);

/// Throws PreconditionViolation unless |<mu, g>| <= tolerance * max|g| over
/// the context mesh nodes.
void require_centered(const TransferContext& ctx, const ScalarField& g, const std::string& who,
                      double tolerance = 1e-6);

/// The family L_[theta] h = L(e^{theta g} h) around a calibrated context.
/// The observable is centered against the equilibrium measure on
/// construction.
class PerturbedFamily {
 public:
  PerturbedFamily(const TransferContext& ctx, const ScalarField& observable);

  const TransferContext& context() const { return *ctx_; }
  /// Centered observable.
  const ScalarField& observable() const { return g_; }
  double removed_mean() const { return mean_; }
  /// max |g| over the context mesh nodes.
  double sup_norm() const { return sup_; }
  /// Default perturbative radius 0.25 / |g|_inf (infinite for g = 0).
  double perturbative_radius() const;

 private:
  const TransferContext* ctx_;
  ScalarField g_;
  double mean_ = 0.0;
  double sup_ = 0.0;
};

cplx apply_L_theta(const PerturbedFamily& fam, cplx theta, const ScalarField& h, const SpherePoint& y);

/// |L_[theta]^n h (y) - L^n(e^{theta S_n g} h)(y)|, the left side by n nested
/// single steps and the right side by one tree sum.
double perturbed_identity_check(const PerturbedFamily& fam, cplx theta, const ScalarField& h,
                                const SpherePoint& y, int n);

struct EigenReport {
  cplx theta = 0.0;
  cplx alpha = 0.0;
  /// Complex mesh field, 1 at the reference node.
  ScalarField eigenfunction;
  double residual = 0.0;
  int iterations = 0;
};

/// Leading eigenpair of lambda^{-1} L_[theta] on `mesh` (the context mesh
/// when null). `start` seeds the power iteration (continuation).
EigenReport leading_eigenvalue(const PerturbedFamily& fam, cplx theta, std::shared_ptr<const Mesh> mesh = nullptr,
                               const std::vector<cplx>& start = {});

struct AlphaDerivatives {
  double alpha1 = 0.0;  ///< Lambda'(0)
  double alpha2 = 0.0;  ///< Lambda''(0)
  double richardson_error = 0.0;
};

/// Central differences of Lambda = log alpha at 0 over the steps (decreasing,
/// each half the previous), Richardson-extrapolated. Empty steps means
/// {0.08, 0.04, 0.02} times the perturbative radius.
AlphaDerivatives alpha_derivatives(const PerturbedFamily& fam, std::vector<double> h_steps = {},
                                   std::shared_ptr<const Mesh> mesh = nullptr);

struct RateFunction {
  std::vector<double> theta;
  /// Lambda(theta) = log(alpha(theta) / alpha(0)).
  std::vector<double> lambda;
  double alpha0 = 1.0;
  std::vector<double> epsilon;
  std::vector<double> c;
  /// Lambda at arbitrary theta (set by rate_function; it refers to the
  /// family's context, which must outlive it).
  std::function<double(double)> evaluate;

  /// sup over |theta| <= theta0 of theta eps - Lambda(theta): grid argmax,
  /// then golden-section search between the neighbouring grid points.
  double legendre(double eps) const;
  /// Lambda between grid points (local cubic).
  double lambda_at(double theta) const;

  void write_csv(const std::string& lambda_path, const std::string& legendre_path) const;
};

/// Lambda on a uniform grid of [-theta0, theta0] (grid_size odd, so that 0 is
/// a node) by continuation from theta = 0, and c on grid_size points of
/// [0, Lambda(theta0) / theta0). Throws NonConvexLambda if a second
/// difference is below -1e-8.
RateFunction rate_function(const PerturbedFamily& fam, double theta0, int grid_size,
                           std::shared_ptr<const Mesh> mesh = nullptr);

/// Legendre transform of grid values (x, y): sup_x (s x - y(x)). The
/// refinement evaluates `refine` when given, else a local cubic interpolant.
double legendre_transform(const std::vector<double>& x, const std::vector<double>& y, double s,
                          const std::function<double(double)>& refine = {});

struct GapFit {
  std::string label;
  std::vector<double> series;  ///< sup over nodes of |lambda^{-n} L^n g|, n = 0..n_max
  double mean = 0.0;           ///< <m, g> as measured
  DecayFit fit;
};

struct GapReport {
  std::vector<GapFit> observables;
  double max_beta = 0.0;
  double min_r_squared = 1.0;
};

/// Sup-norm decay of lambda^{-n} L^n g over the context mesh for each
/// m-centered g. Throws PreconditionViolation when |<m, g>| exceeds
/// `centering_tolerance` (relative to sup |g|).
GapReport spectral_gap_rate(const TransferContext& ctx, const std::vector<ScalarField>& g_family, int n_max,
                            double centering_tolerance = 1e-6);

/// g - <m, g>.
ScalarField center_conformal(const TransferContext& ctx, const ScalarField& g);

enum class CocycleVerdict { contracting, non_contracting, inconclusive };
const char* to_string(CocycleVerdict v);

struct CocycleResult {
  double t = 0.0;
  std::vector<double> series;  ///< max over probes of sup |lambda^{-n} L_[it]^n h|
  double rate = 0.0;
  double r_squared = 0.0;
  CocycleVerdict verdict = CocycleVerdict::inconclusive;
};

struct CocycleOptions {
  /// Contracting requires a fitted rate below 1 - margin.
  double margin = 0.02;
  double min_r_squared = 0.9;
};

/// Decay of lambda^{-n} L_[it]^n on the probe family {1, rho, X, Y}
/// (X, Y the bounded sphere coordinates) through the collocation operator.
std::vector<CocycleResult> cocycle_test(const PerturbedFamily& fam, const std::vector<double>& t_values, int n_max,
                                        const CocycleOptions& opts = {});

}  // namespace ruelle
