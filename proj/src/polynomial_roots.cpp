#include "ruelle/polynomial_roots.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "ruelle/error.hpp"

namespace ruelle {

int RootSet::total_multiplicity() const {
  int total = 0;
  for (const auto& r : *this) total += r.multiplicity;
  return total;
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// p(t) and p'(t) by Horner; also the absolute-value bound sum |a_k| |t|^k.
struct HornerResult {
  cplx value;
  cplx derivative;
  double magnitude;
};

HornerResult horner(std::span<const cplx> a, cplx t) {
  const std::size_t n = a.size() - 1;
  cplx p = a[n];
  cplx dp = 0.0;
  double mag = std::abs(a[n]);
  const double at = std::abs(t);
  for (std::size_t k = n; k-- > 0;) {
    dp = dp * t + p;
    p = p * t + a[k];
    mag = mag * at + std::abs(a[k]);
  }
  return {p, dp, mag};
}

// Principal square root without the overflow guards of the library version;
// arguments here are products of normalized coefficients.
cplx principal_sqrt(cplx w) {
  const double x = w.real(), y = w.imag();
  const double r = std::sqrt(x * x + y * y);
  if (r == 0.0) return 0.0;
  const double t = std::sqrt(0.5 * (std::abs(x) + r));
  if (x >= 0.0) return {t, y / (2.0 * t)};
  return {std::abs(y) / (2.0 * t), std::copysign(t, y)};
}

// Solves a[0] + a[1] t + ... + a[n] t^n for n <= 2 in closed form.
void low_degree_roots(std::span<const cplx> a, std::span<cplx> out) {
  if (a.size() == 2) {
    out[0] = -a[0] / a[1];
    return;
  }
  const cplx qa = a[2], qb = a[1], qc = a[0];
  if (qb == 0.0) {
    // Keep the pair exactly symmetric.
    out[0] = principal_sqrt(-qc / qa);
    out[1] = -out[0];
    return;
  }
  cplx disc = principal_sqrt(qb * qb - 4.0 * qa * qc);
  if ((std::conj(qb) * disc).real() < 0.0) disc = -disc;
  const cplx q = -0.5 * (qb + disc);
  if (q == 0.0) {
    out[0] = out[1] = 0.0;
    return;
  }
  out[0] = q / qa;
  out[1] = qc / q;
}

// Quadratic form with no root at 0 or infinity; same result as the general
// path below, without its bookkeeping (this is the hot loop of every chain).
RootSet generic_quadratic(std::span<const cplx> c, const RootOptions& opts) {
  const bool affine_chart = std::norm(c[2]) >= std::norm(c[0]);
  const std::array<cplx, 3> a = affine_chart ? std::array<cplx, 3>{c[0], c[1], c[2]}
                                             : std::array<cplx, 3>{c[2], c[1], c[0]};
  std::array<cplx, 2> t;
  low_degree_roots(a, t);
  const SpherePoint p = affine_chart ? SpherePoint(t[0], cplx(1.0)) : SpherePoint(cplx(1.0), t[0]);
  const SpherePoint q = affine_chart ? SpherePoint(t[1], cplx(1.0)) : SpherePoint(cplx(1.0), t[1]);
  RootSet out;
  if (fs_distance(p, q) <= opts.cluster_radius) {
    const bool chart = std::norm(p.z1()) >= std::norm(p.z0());
    const cplx cp = chart ? p.z0() / p.z1() : p.z1() / p.z0();
    const cplx cq = chart ? q.z0() / q.z1() : q.z1() / q.z0();
    const cplx mean = (cp + cq) / 2.0;
    out.push_back({chart ? SpherePoint(mean, cplx(1.0)) : SpherePoint(cplx(1.0), mean), 2});
  } else {
    out.push_back({p, 1});
    out.push_back({q, 1});
  }
  return out;
}

}  // namespace

bool aberth_roots(std::span<const cplx> a, std::span<cplx> roots, int max_iterations) {
  const std::size_t n = a.size() - 1;
  // Start on the circle whose radius is the geometric mean of root moduli.
  const double radius = std::pow(std::abs(a[0]) / std::abs(a[n]), 1.0 / static_cast<double>(n));
  const double r0 = (radius > 0.0 && std::isfinite(radius)) ? radius : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n) + 0.4;
    roots[i] = std::polar(r0, ang);
  }
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool settled = true;
    for (std::size_t i = 0; i < n; ++i) {
      const auto h = horner(a, roots[i]);
      if (std::abs(h.value) <= 4.0 * kEps * h.magnitude) continue;
      settled = false;
      const cplx ratio = h.value / h.derivative;
      cplx repulsion = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) repulsion += 1.0 / (roots[i] - roots[j]);
      }
      const cplx step = ratio / (1.0 - ratio * repulsion);
      if (std::isfinite(step.real()) && std::isfinite(step.imag())) roots[i] -= step;
    }
    if (settled) return true;
  }
  // Accept a stalled iteration when the backward error is small (clusters).
  for (std::size_t i = 0; i < n; ++i) {
    const auto h = horner(a, roots[i]);
    if (!(std::abs(h.value) <= 1e-10 * h.magnitude)) return false;
  }
  return true;
}

RootSet homogeneous_roots(std::span<const cplx> coeffs, const RootOptions& opts) {
  const int d = static_cast<int>(coeffs.size()) - 1;
  if (d < 1 || d > kMaxDegree) throw InputError("homogeneous_roots: degree out of range");

  // Exact zeros at either end are roots at 0 = [0:1] and infinity = [1:0].
  int lo = 0;
  while (lo <= d && coeffs[lo] == 0.0) ++lo;
  if (lo > d) throw InputError("homogeneous_roots: zero form");
  int hi = d;
  while (coeffs[hi] == 0.0) --hi;

  if (d == 2 && lo == 0 && hi == 2) return generic_quadratic(coeffs, opts);

  RootSet raw;
  for (int k = 0; k < lo; ++k) raw.push_back({SpherePoint(cplx(0.0), cplx(1.0)), 1});
  for (int k = hi; k < d; ++k) raw.push_back({SpherePoint::infinity(), 1});

  const int m = hi - lo;
  if (m > 0) {
    std::array<cplx, kMaxDegree + 1> a{};
    std::array<cplx, kMaxDegree> t{};
    // Chart z0/z1 when the top coefficient dominates, else z1/z0 (reversed).
    const bool affine_chart = std::norm(coeffs[hi]) >= std::norm(coeffs[lo]);
    for (int k = 0; k <= m; ++k) {
      a[k] = affine_chart ? coeffs[lo + k] : coeffs[hi - k];
    }
    std::span<const cplx> poly(a.data(), m + 1);
    std::span<cplx> out(t.data(), m);
    if (m <= 2) {
      low_degree_roots(poly, out);
    } else if (!aberth_roots(poly, out, opts.max_iterations)) {
      throw RootFindingFailure("homogeneous_roots: Aberth iteration did not converge");
    }
    for (int k = 0; k < m; ++k) {
      raw.push_back({affine_chart ? SpherePoint(t[k], cplx(1.0)) : SpherePoint(cplx(1.0), t[k]), 1});
    }
  }

  // Merge clusters; the merged point is the multiplicity-weighted mean taken
  // in the chart of the first member.
  RootSet result;
  std::array<cplx, kMaxDegree> sum{};
  std::array<bool, kMaxDegree> chart_affine{};
  for (const auto& r : raw) {
    const SpherePoint& p = r.point;
    bool merged = false;
    for (std::size_t c = 0; c < result.size(); ++c) {
      if (fs_distance(result[c].point, p) <= opts.cluster_radius) {
        const cplx coord = chart_affine[c] ? p.z0() / p.z1() : p.z1() / p.z0();
        sum[c] += coord;
        result[c].multiplicity += 1;
        merged = true;
        break;
      }
    }
    if (!merged) {
      const std::size_t c = result.size();
      chart_affine[c] = std::norm(p.z1()) >= std::norm(p.z0());
      sum[c] = chart_affine[c] ? p.z0() / p.z1() : p.z1() / p.z0();
      result.push_back(r);
    }
  }
  for (std::size_t c = 0; c < result.size(); ++c) {
    if (result[c].multiplicity > 1) {
      const cplx mean = sum[c] / static_cast<double>(result[c].multiplicity);
      result[c].point = chart_affine[c] ? SpherePoint(mean, cplx(1.0)) : SpherePoint(cplx(1.0), mean);
    }
  }
  return result;
}

}  // namespace ruelle
