#include "ruelle/harness/fourier_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ruelle/error.hpp"

namespace ruelle::harness {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double param(const FieldSpec& spec, const std::string& key, double fallback) {
  const auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : it->second;
}

int integer_mode(const FieldSpec& spec) {
  const double m = param(spec, "m", 1.0);
  if (m < 0.0 || m != std::round(m)) throw ConfigError("field '" + spec.name + "': mode must be a nonnegative integer");
  return static_cast<int>(m);
}

TrigPolynomial shifted(TrigPolynomial g, double c) {
  if (g.a.empty()) g.a.assign(1, 0.0);
  g.a[0] += c;
  return g;
}

// Coefficients w_k of e^{phi + theta g}, k = -K..K, by an N-point DFT.
struct WeightCoefficients {
  int k_max;
  std::vector<cplx> w;
  double tail = 0.0;
  cplx operator[](int k) const { return std::abs(k) > k_max ? cplx(0.0) : w[k + k_max]; }
};

WeightCoefficients weight_coefficients(const TrigPolynomial& phi, cplx theta, const TrigPolynomial& g, int k_max) {
  int n = 64;
  while (n < 8 * k_max + 64) n *= 2;
  std::vector<cplx> samples(n);
  for (int j = 0; j < n; ++j) {
    const double t = kTwoPi * j / n;
    samples[j] = std::exp(phi(t) + theta * g(t));
  }
  auto coefficient = [&](int k) {
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) s += samples[j] * std::polar(1.0, -kTwoPi * static_cast<double>((static_cast<long>(k) * j) % n) / n);
    return s / static_cast<double>(n);
  };
  WeightCoefficients out{k_max, std::vector<cplx>(2 * k_max + 1)};
  for (int k = -k_max; k <= k_max; ++k) out.w[k + k_max] = coefficient(k);
  for (int k = n / 4; k < n / 2; k += std::max(1, n / 64)) {
    out.tail = std::max({out.tail, std::abs(coefficient(k)), std::abs(coefficient(-k))});
  }
  return out;
}

struct Leading {
  cplx value;
  Eigen::VectorXcd right;
  Eigen::VectorXcd left;
};

Leading leading_pair(const Eigen::MatrixXcd& a) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> right(a);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> left(a.transpose());
  if (right.info() != Eigen::Success || left.info() != Eigen::Success) {
    throw NoDominantEigenvalue("Fourier oracle: eigen-solve failed");
  }
  Eigen::Index ir = 0, il = 0;
  right.eigenvalues().cwiseAbs().maxCoeff(&ir);
  left.eigenvalues().cwiseAbs().maxCoeff(&il);
  return {right.eigenvalues()(ir), right.eigenvectors().col(ir), left.eigenvectors().col(il)};
}

cplx leading_value(const Eigen::MatrixXcd& a) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, false);
  if (solver.info() != Eigen::Success) throw NoDominantEigenvalue("Fourier oracle: eigen-solve failed");
  Eigen::Index i = 0;
  solver.eigenvalues().cwiseAbs().maxCoeff(&i);
  return solver.eigenvalues()(i);
}

// Product of g with a coefficient vector, truncated to |k| <= M.
Eigen::VectorXcd multiply(const TrigPolynomial& g, const Eigen::VectorXcd& v) {
  const int m = static_cast<int>(v.size() - 1) / 2;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  const int d = g.degree();
  for (int k = -d; k <= d; ++k) {
    const cplx c = g.coefficient(k);
    if (c == 0.0) continue;
    for (int j = -m; j <= m; ++j) {
      const int target = j + k;
      if (std::abs(target) <= m) out(target + m) += c * v(j + m);
    }
  }
  return out;
}

// Left eigenvector as the functional m, normalized to m(1) = 1, and the
// right eigenvector normalized to m(rho) = 1.
void normalize_pair(Leading& p, int m) {
  p.left /= p.left(m);
  p.right /= (p.left.transpose() * p.right)(0);
}

TrigPolynomial zero_polynomial() { return TrigPolynomial::constant(0.0); }

}  // namespace

int TrigPolynomial::degree() const {
  int d = 0;
  for (int k = 0; k < static_cast<int>(std::max(a.size(), b.size())); ++k) {
    const double ak = k < static_cast<int>(a.size()) ? a[k] : 0.0;
    const double bk = k < static_cast<int>(b.size()) ? b[k] : 0.0;
    if (ak != 0.0 || bk != 0.0) d = k;
  }
  return d;
}

double TrigPolynomial::operator()(double t) const {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::cos(k * t);
  for (std::size_t k = 0; k < b.size(); ++k) s += b[k] * std::sin(k * t);
  return s;
}

cplx TrigPolynomial::coefficient(int k) const {
  const std::size_t n = static_cast<std::size_t>(std::abs(k));
  const double ak = n < a.size() ? a[n] : 0.0;
  const double bk = n < b.size() ? b[n] : 0.0;
  if (k == 0) return ak;
  // a cos + b sin = (a - i b)/2 e^{ikt} + (a + i b)/2 e^{-ikt}
  return k > 0 ? cplx(ak, -bk) / 2.0 : cplx(ak, bk) / 2.0;
}

TrigPolynomial TrigPolynomial::constant(double c) { return TrigPolynomial{{c}, {}}; }

TrigPolynomial TrigPolynomial::cosine(int k, double amplitude) {
  TrigPolynomial p;
  p.a.assign(k + 1, 0.0);
  p.a[k] = amplitude;
  return p;
}

TrigPolynomial TrigPolynomial::from_spec(const FieldSpec& spec) {
  const double amp = param(spec, "amplitude", 1.0);
  if (spec.name == "zero") return constant(0.0);
  if (spec.name == "constant") return constant(amp * param(spec, "value", 1.0));
  if (spec.name == "cos_re") return cosine(1, amp);
  if (spec.name == "cos_mode") return cosine(integer_mode(spec), amp);
  if (spec.name == "sin_mode") {
    TrigPolynomial p;
    const int m = integer_mode(spec);
    p.b.assign(m + 1, 0.0);
    p.b[m] = amp;
    return p;
  }
  if (spec.name == "dyadic_tail") {
    const int terms = static_cast<int>(param(spec, "terms", 48));
    if (terms > 7) throw ConfigError("dyadic_tail with more than 7 terms has no oracle expansion");
    TrigPolynomial p;
    double c = amp;
    for (int j = 0, freq = 1; j < terms; ++j, freq *= 2) {
      if (static_cast<int>(p.a.size()) <= freq) p.a.resize(freq + 1, 0.0);
      p.a[freq] += c;
      c *= param(spec, "ratio", 0.5);
    }
    return p;
  }
  throw ConfigError("field '" + spec.name + "' has no finite Fourier expansion");
}

FourierOracle::FourierOracle(TrigPolynomial phi, int truncation) : phi_(std::move(phi)), m_(truncation) {
  if (truncation < 0) throw PreconditionViolation("FourierOracle: negative truncation");
}

int FourierOracle::truncation_for(const TrigPolynomial& g) const {
  return m_ > 0 ? m_ : std::max(32, 4 * (phi_.degree() + g.degree()));
}

Eigen::MatrixXcd FourierOracle::matrix(cplx theta, const TrigPolynomial& g, int truncation) const {
  const int m = truncation;
  const auto w = weight_coefficients(phi_, theta, g, 3 * m);
  Eigen::MatrixXcd a(2 * m + 1, 2 * m + 1);
  for (int n = -m; n <= m; ++n) {
    for (int k = -m; k <= m; ++k) a(n + m, k + m) = 2.0 * w[2 * n - k];
  }
  return a;
}

double FourierOracle::coefficient_tail(cplx theta, const TrigPolynomial& g, int truncation) const {
  return weight_coefficients(phi_, theta, g, 3 * truncation).tail;
}

double oracle_lambda(const FourierOracle& oracle) {
  const TrigPolynomial zero = zero_polynomial();
  return leading_value(oracle.matrix(0.0, zero, oracle.truncation_for(zero))).real();
}

double oracle_density(const FourierOracle& oracle, double t) {
  const TrigPolynomial zero = zero_polynomial();
  const int m = oracle.truncation_for(zero);
  Leading p = leading_pair(oracle.matrix(0.0, zero, m));
  normalize_pair(p, m);
  cplx s = 0.0;
  for (int k = -m; k <= m; ++k) s += p.right(k + m) * std::polar(1.0, k * t);
  return s.real();
}

namespace {

double equilibrium_mean(const FourierOracle& oracle, const TrigPolynomial& g, int m) {
  Leading p = leading_pair(oracle.matrix(0.0, zero_polynomial(), m));
  normalize_pair(p, m);
  return (p.left.transpose() * multiply(g, p.right))(0).real();
}

}  // namespace

double oracle_log_alpha(const FourierOracle& oracle, const TrigPolynomial& g, double theta) {
  const int m = oracle.truncation_for(g);
  const double lambda = oracle_lambda(oracle);
  const TrigPolynomial gc = shifted(g, -equilibrium_mean(oracle, g, m));
  return std::log(std::abs(leading_value(oracle.matrix(theta, gc, m))) / lambda);
}

double oracle_legendre(const FourierOracle& oracle, const TrigPolynomial& g, double eps, double theta_max) {
  const int m = oracle.truncation_for(g);
  const double lambda = oracle_lambda(oracle);
  const TrigPolynomial gc = shifted(g, -equilibrium_mean(oracle, g, m));
  auto objective = [&](double th) {
    return th * eps - std::log(std::abs(leading_value(oracle.matrix(th, gc, m))) / lambda);
  };
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = -theta_max, hi = theta_max;
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = objective(x1);
    }
  }
  return std::max({f1, f2, objective(0.0)});
}

OracleSpectrum oracle_spectrum(const FourierOracle& oracle, cplx theta, const TrigPolynomial& g,
                               const OracleOptions& opts) {
  const int m = oracle.truncation_for(g);
  if (m < 4 * (oracle.weight().degree() + g.degree())) {
    throw PreconditionViolation("oracle_spectrum: truncation below 4 (deg phi + deg g)");
  }
  if (opts.grid_size < 2 || opts.moments < 0) throw PreconditionViolation("oracle_spectrum: bad options");
  const TrigPolynomial zero = zero_polynomial();
  OracleSpectrum out;

  Leading base = leading_pair(oracle.matrix(0.0, zero, m));
  normalize_pair(base, m);
  out.lambda = base.value.real();
  out.eigenvector = base.right;
  for (int k = 0; k <= opts.moments; ++k) {
    out.conformal_moments.push_back(k <= m ? base.left(k + m) : cplx(0.0));
    cplx s = 0.0;
    for (int j = -m; j <= m; ++j) {
      if (std::abs(j - k) <= m) s += base.left(j + m) * base.right(j - k + m);
    }
    out.equilibrium_moments.push_back(s);
  }
  out.observable_mean = (base.left.transpose() * multiply(g, base.right))(0).real();
  const TrigPolynomial gc = shifted(g, -out.observable_mean);

  out.alpha = leading_value(oracle.matrix(theta, gc, m)) / out.lambda;
  const double lambda2 = leading_value(oracle.matrix(0.0, zero, 2 * m)).real();
  const cplx alpha2 = leading_value(oracle.matrix(theta, gc, 2 * m)) / lambda2;
  out.truncation_change = std::abs(alpha2 - out.alpha);
  out.coefficient_tail = oracle.coefficient_tail(theta, gc, m);
  if (!(out.truncation_change < 1e-10)) {
    throw TruncationInsufficient("oracle_spectrum: doubling the truncation moves alpha by " +
                                 std::to_string(out.truncation_change));
  }

  for (int i = 0; i < opts.grid_size; ++i) {
    const double th = -opts.theta_max + 2.0 * opts.theta_max * i / (opts.grid_size - 1);
    out.theta_grid.push_back(th);
    out.lambda_grid.push_back(std::log(std::abs(leading_value(oracle.matrix(th, gc, m))) / out.lambda));
  }

  // Green-Kubo in coefficient space: C_k = lambda^{-k} m(gc . L^k(rho gc)).
  const Eigen::MatrixXcd a = oracle.matrix(0.0, zero, m);
  Eigen::VectorXcd v = multiply(gc, base.right);
  auto functional = [&](const Eigen::VectorXcd& u) { return (base.left.transpose() * multiply(gc, u))(0).real(); };
  const double c0 = functional(v);
  out.sigma2 = c0;
  int quiet = 0;
  for (int k = 1; k <= opts.correlation_terms && quiet < 3; ++k) {
    v = a * v / out.lambda;
    const double ck = functional(v);
    out.sigma2 += 2.0 * ck;
    quiet = std::abs(ck) <= 1e-18 * std::abs(c0) ? quiet + 1 : 0;
  }
  return out;
}

}  // namespace ruelle::harness
