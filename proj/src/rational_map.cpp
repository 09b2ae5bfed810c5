#include "ruelle/rational_map.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ruelle/error.hpp"

namespace ruelle {

namespace {

double coeff_norm(const std::vector<cplx>& c) {
  double s = 0.0;
  for (const auto& v : c) s += std::norm(v);
  return std::sqrt(s);
}

// sum_k c[k] u^k with u = z0/z1 (forward) or sum_k c[k] u^(d-k) with u = z1/z0.
cplx horner_chart(const std::vector<cplx>& c, cplx u, bool reversed) {
  const std::size_t d = c.size() - 1;
  cplx acc = 0.0;
  if (!reversed) {
    for (std::size_t k = d + 1; k-- > 0;) acc = acc * u + c[k];
  } else {
    for (std::size_t k = 0; k <= d; ++k) acc = acc * u + c[k];
  }
  return acc;
}

}  // namespace

RationalMap::RationalMap(std::vector<cplx> p, std::vector<cplx> q, std::string label)
    : p_(std::move(p)), q_(std::move(q)), label_(std::move(label)) {
  if (p_.size() != q_.size()) throw InvalidMap("RationalMap: p and q must have d+1 coefficients");
  degree_ = static_cast<int>(p_.size()) - 1;
  if (degree_ < 2) throw InvalidMap("RationalMap: degree must be at least 2");
  if (degree_ > kMaxDegree) throw InvalidMap("RationalMap: degree exceeds supported maximum");
  for (const auto& v : p_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidMap("RationalMap: non-finite coefficient");
  }
  for (const auto& v : q_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidMap("RationalMap: non-finite coefficient");
  }
  if (!(normalized_resultant() > 1e-12)) {
    throw InvalidMap("RationalMap: P and Q share a root (resultant vanishes)");
  }
}

RationalMap RationalMap::polynomial(std::vector<cplx> coeffs, std::string label) {
  std::vector<cplx> q(coeffs.size(), cplx(0.0));
  q[0] = 1.0;
  return RationalMap(std::move(coeffs), std::move(q), std::move(label));
}

double RationalMap::normalized_resultant() const {
  const int d = degree_;
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  for (int r = 0; r < d; ++r) {
    for (int k = 0; k <= d; ++k) {
      s(r, r + k) = p_[d - k];
      s(d + r, r + k) = q_[d - k];
    }
  }
  const double det = std::abs(s.partialPivLu().determinant());
  const double scale = std::pow(coeff_norm(p_), d) * std::pow(coeff_norm(q_), d);
  return scale > 0.0 ? det / scale : 0.0;
}

SpherePoint RationalMap::operator()(const SpherePoint& x) const {
  const bool reversed = std::abs(x.z0()) > std::abs(x.z1());
  const cplx u = reversed ? x.z1() / x.z0() : x.z0() / x.z1();
  return SpherePoint(horner_chart(p_, u, reversed), horner_chart(q_, u, reversed));
}

SpherePoint RationalMap::iterate(SpherePoint x, int n) const {
  for (int i = 0; i < n; ++i) x = (*this)(x);
  return x;
}

RootSet RationalMap::preimages(const SpherePoint& y, const RootOptions& opts) const {
  std::array<cplx, kMaxDegree + 1> r;
  for (int k = 0; k <= degree_; ++k) r[k] = y.z1() * p_[k] - y.z0() * q_[k];
  return homogeneous_roots(std::span<const cplx>(r.data(), degree_ + 1), opts);
}

RootSet RationalMap::critical_points(const RootOptions& opts) const {
  const int d = degree_;
  std::vector<cplx> w(2 * d - 1, cplx(0.0));
  for (int i = 0; i <= d; ++i) {
    for (int j = 0; j <= d; ++j) {
      const int k = i + j - 1;
      if (k < 0 || k > 2 * d - 2 || i == j) continue;
      w[k] += static_cast<double>(i - j) * p_[i] * q_[j];
    }
  }
  return homogeneous_roots(w, opts);
}

}  // namespace ruelle
