#pragma once

// Reference computations for z -> z^d on the unit circle, written directly in
// the angle coordinate and independent of the library's trees, meshes and
// estimators. The transfer operator becomes
//   (L h)(t) = sum_k e^{phi(s_k)} h(s_k),  s_k = (t + 2 pi k) / d,
// discretized by Nystrom collocation on an equispaced grid with
// trigonometric interpolation, which is spectrally accurate for analytic
// potentials.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using Fn = std::function<double(double)>;
using CFn = std::function<std::complex<double>(double)>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Periodic cardinal function of an even grid of n points (spacing 2 pi / n).
inline double cardinal(int n, double x) {
  x = std::remainder(x, kTwoPi);
  if (std::abs(x) < 1e-14) return 1.0;
  return std::sin(0.5 * n * x) / (n * std::tan(0.5 * x));
}

inline std::vector<double> grid(int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = kTwoPi * i / n;
  return t;
}

/// Nystrom matrix of h -> sum_k e^{w(s_k)} h(s_k) for a complex exponent w.
inline Eigen::MatrixXcd nystrom(int d, const CFn& w, int n) {
  const auto t = grid(n);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) {
      const double s = (t[i] + kTwoPi * k) / d;
      const std::complex<double> e = std::exp(w(s));
      for (int j = 0; j < n; ++j) a(i, j) += e * cardinal(n, s - t[j]);
    }
  }
  return a;
}

struct Spectrum {
  int n = 0;
  std::complex<double> lambda;
  Eigen::VectorXcd rho;   ///< right eigenvector, normalized with <m, rho> = 1
  Eigen::VectorXcd left;  ///< conformal functional on grid values, <m, 1> = 1
  std::complex<double> second;  ///< subleading eigenvalue

  /// Trigonometric interpolation of grid values.
  std::complex<double> interpolate(const Eigen::VectorXcd& v, double t) const {
    std::complex<double> s = 0.0;
    for (int j = 0; j < n; ++j) s += v(j) * cardinal(n, t - kTwoPi * j / n);
    return s;
  }
  double rho_at(double t) const { return interpolate(rho, t).real(); }
  std::complex<double> m(const CFn& g) const {
    std::complex<double> s = 0.0;
    for (int j = 0; j < n; ++j) s += left(j) * g(kTwoPi * j / n);
    return s;
  }
  std::complex<double> mu(const CFn& g) const {
    std::complex<double> s = 0.0;
    for (int j = 0; j < n; ++j) s += left(j) * rho(j) * g(kTwoPi * j / n);
    return s;
  }
};

inline Spectrum spectrum(int d, const CFn& w, int n = 128) {
  const Eigen::MatrixXcd a = nystrom(d, w, n);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> right(a);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> left(a.transpose());
  auto order = [](const Eigen::VectorXcd& ev) {
    std::vector<int> idx(ev.size());
    for (int i = 0; i < ev.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int x, int y) { return std::abs(ev(x)) > std::abs(ev(y)); });
    return idx;
  };
  const auto ir = order(right.eigenvalues());
  const auto il = order(left.eigenvalues());
  Spectrum s;
  s.n = n;
  s.lambda = right.eigenvalues()(ir[0]);
  s.second = right.eigenvalues()(ir[1]);
  s.rho = right.eigenvectors().col(ir[0]);
  s.left = left.eigenvectors().col(il[0]);
  s.left /= s.left.sum();
  s.rho /= (s.left.transpose() * s.rho)(0);
  return s;
}

inline Spectrum spectrum(int d, const Fn& phi, int n = 128) {
  return spectrum(d, CFn([&](double t) { return std::complex<double>(phi(t)); }), n);
}

/// L^k g at the grid for the normalized operator L h = (lambda rho)^{-1} L(rho h).
inline std::vector<Eigen::VectorXcd> normalized_powers(int d, const Fn& phi, const Fn& g, int k_max, int n = 128) {
  const Spectrum s = spectrum(d, phi, n);
  const Eigen::MatrixXcd a = nystrom(d, CFn([&](double t) { return std::complex<double>(phi(t)); }), n);
  std::vector<Eigen::VectorXcd> out;
  Eigen::VectorXcd v(n);
  const auto t = grid(n);
  for (int j = 0; j < n; ++j) v(j) = g(t[j]);
  out.push_back(v);
  for (int k = 1; k <= k_max; ++k) {
    v = (a * (s.rho.cwiseProduct(v))).cwiseQuotient(s.rho) / s.lambda;
    out.push_back(v);
  }
  return out;
}

/// Asymptotic variance sum_{k in Z} <mu, gc . gc o f^k>, gc = g - <mu, g>.
inline double green_kubo(int d, const Fn& phi, const Fn& g, int k_max = 60, int n = 128) {
  const Spectrum s = spectrum(d, phi, n);
  const double mean = s.mu([&](double t) { return std::complex<double>(g(t)); }).real();
  const Fn gc = [&](double t) { return g(t) - mean; };
  const auto powers = normalized_powers(d, phi, gc, k_max, n);
  const Eigen::VectorXcd& g0 = powers[0];
  auto mu = [&](const Eigen::VectorXcd& v) { return (s.left.transpose() * s.rho.cwiseProduct(v))(0).real(); };
  double sigma2 = mu(g0.cwiseProduct(g0));
  for (int k = 1; k <= k_max; ++k) sigma2 += 2.0 * mu(powers[k].cwiseProduct(g0));
  return sigma2;
}

}  // namespace oracle
