#pragma once

#include <Eigen/Dense>

#include <vector>

#include "ruelle/harness/corpus.hpp"
#include "ruelle/sphere_point.hpp"

namespace ruelle::harness {

/// Real trigonometric polynomial sum_k a_k cos(k t) + b_k sin(k t).
struct TrigPolynomial {
  std::vector<double> a;
  std::vector<double> b;

  int degree() const;
  double operator()(double t) const;
  /// Complex Fourier coefficient of e^{ikt}, |k| <= degree.
  cplx coefficient(int k) const;

  static TrigPolynomial constant(double c);
  static TrigPolynomial cosine(int k, double amplitude = 1.0);
  /// Circle restriction of a closed-form field spec; throws ConfigError for
  /// fields without a finite trigonometric expansion.
  static TrigPolynomial from_spec(const FieldSpec& spec);
};

/// Transfer operator of t -> 2t with weight e^{phi} on the Fourier modes
/// e^{imt}, |m| <= M: (L h)_n = 2 sum_m w_{2n-m} h_m with w the coefficients
/// of e^{phi + theta g}.
class FourierOracle {
 public:
  /// truncation 0 picks max(32, 4 (deg phi + deg g)) per observable.
  explicit FourierOracle(TrigPolynomial phi, int truncation = 0);

  const TrigPolynomial& weight() const { return phi_; }
  int truncation_for(const TrigPolynomial& g) const;

  /// Operator matrix for the weight e^{phi + theta g} at truncation M.
  Eigen::MatrixXcd matrix(cplx theta, const TrigPolynomial& g, int truncation) const;
  /// Largest |w_k| over the aliased band of the coefficient computation.
  double coefficient_tail(cplx theta, const TrigPolynomial& g, int truncation) const;

 private:
  TrigPolynomial phi_;
  int m_;
};

struct OracleOptions {
  /// Real theta grid [-theta_max, theta_max] with `grid_size` points for Lambda.
  double theta_max = 1.0;
  int grid_size = 41;
  /// Moments <m, e^{ikt}>, <mu, e^{ikt}> for k = 0..moments.
  int moments = 4;
  /// Green-Kubo terms summed.
  int correlation_terms = 200;
};

struct OracleSpectrum {
  double lambda = 0.0;
  /// alpha(theta) = leading eigenvalue at e^{phi + theta (g - <mu, g>)} over lambda.
  cplx alpha;
  /// Fourier coefficients (index m + M) of the leading right eigenvector,
  /// normalized against the left one.
  Eigen::VectorXcd eigenvector;
  std::vector<double> theta_grid;
  std::vector<double> lambda_grid;  ///< Lambda(theta) = log alpha(theta)
  double sigma2 = 0.0;
  double observable_mean = 0.0;
  std::vector<cplx> conformal_moments;
  std::vector<cplx> equilibrium_moments;
  /// |alpha_M - alpha_2M| from the truncation-doubling check.
  double truncation_change = 0.0;
  double coefficient_tail = 0.0;
};

/// Throws PreconditionViolation when M < 4 (deg phi + deg g), and
/// TruncationInsufficient when doubling M moves alpha by 1e-10 or more.
OracleSpectrum oracle_spectrum(const FourierOracle& oracle, cplx theta, const TrigPolynomial& g,
                               const OracleOptions& opts = {});

/// Leading eigenvalue lambda of the unperturbed matrix.
double oracle_lambda(const FourierOracle& oracle);

/// rho(t) from the oracle eigenvector, normalized by <m, rho> = 1.
double oracle_density(const FourierOracle& oracle, double t);

/// Log alpha for real theta (g centered against mu).
double oracle_log_alpha(const FourierOracle& oracle, const TrigPolynomial& g, double theta);

/// c(eps) = sup_theta (theta eps - Lambda(theta)) over |theta| <= theta_max,
/// by golden section on the concave objective.
double oracle_legendre(const FourierOracle& oracle, const TrigPolynomial& g, double eps, double theta_max = 4.0);

}  // namespace ruelle::harness
