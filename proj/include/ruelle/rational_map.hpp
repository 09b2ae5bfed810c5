#pragma once

#include <string>
#include <vector>

#include "ruelle/polynomial_roots.hpp"
#include "ruelle/sphere_point.hpp"

namespace ruelle {

/// A degree-d holomorphic self-map of P^1, f = [P : Q], with
/// P(z0, z1) = sum_k p[k] z0^k z1^(d-k) and likewise Q. In the affine chart
/// f(z) = (p[0] + p[1] z + ... ) / (q[0] + q[1] z + ...).
class RationalMap {
 public:
  /// Validates degree >= 2 and a nonvanishing resultant; throws InvalidMap.
  RationalMap(std::vector<cplx> p, std::vector<cplx> q, std::string label = {});

  /// f(z) = z^d + c.
  static RationalMap polynomial(std::vector<cplx> coeffs, std::string label = {});

  int degree() const { return degree_; }
  const std::vector<cplx>& p() const { return p_; }
  const std::vector<cplx>& q() const { return q_; }
  const std::string& label() const { return label_; }

  SpherePoint operator()(const SpherePoint& x) const;
  SpherePoint iterate(SpherePoint x, int n) const;

  /// f^{-1}(y) with multiplicities (which sum to d).
  RootSet preimages(const SpherePoint& y, const RootOptions& opts = {}) const;

  /// Critical points: roots of the homogenized Wronskian P'Q - PQ', 2d - 2
  /// of them counted with multiplicity.
  RootSet critical_points(const RootOptions& opts = {}) const;

  /// Sylvester resultant of the two forms, normalized by coefficient scale.
  double normalized_resultant() const;

 private:
  std::vector<cplx> p_;
  std::vector<cplx> q_;
  std::string label_;
  int degree_ = 0;
};

}  // namespace ruelle
