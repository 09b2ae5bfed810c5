#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace ruelle {

using cplx = std::complex<double>;

/// A point of the Riemann sphere in homogeneous coordinates [z0 : z1].
///
/// The affine coordinate is z = z0 / z1, so [0:1] is the origin and [1:0] is
/// infinity. Coordinates are kept normalized, |z0|^2 + |z1|^2 = 1, and the
/// phase is fixed by making the larger coordinate real and positive (ties go
/// to z1). Two representatives of the same point therefore compare equal
/// coordinate-wise up to rounding.
class SpherePoint {
 public:
  /// The origin, [0:1].
  SpherePoint() : z0_(0.0), z1_(1.0) {}

  /// Normalizes an arbitrary nonzero pair. Throws InputError on (0, 0).
  SpherePoint(cplx z0, cplx z1);

  static SpherePoint from_affine(cplx z);
  static SpherePoint infinity() { return SpherePoint(cplx(1.0), cplx(0.0)); }
  /// e^{i angle} on the unit circle.
  static SpherePoint on_circle(double angle);

  cplx z0() const { return z0_; }
  cplx z1() const { return z1_; }

  bool is_infinity() const { return z1_ == 0.0; }
  /// z0 / z1; returns a huge value at infinity.
  cplx affine() const;
  /// arg(z0) - arg(z1), the angle of the affine coordinate in (-pi, pi].
  double angle() const;

  /// Coordinates of the point on the unit sphere in R^3 (stereographic
  /// convention: infinity is (0, 0, 1)). X equals Re z on the unit circle.
  double x() const;
  double y() const;
  double height() const;

  /// Chordal distance, normalized so antipodal points are at distance 1.
  friend double fs_distance(const SpherePoint& a, const SpherePoint& b) {
    return std::sqrt(std::norm(a.z0_ * b.z1_ - a.z1_ * b.z0_));
  }

 private:
  struct Raw {};
  SpherePoint(cplx z0, cplx z1, Raw) : z0_(z0), z1_(z1) {}
  cplx z0_;
  cplx z1_;
};

inline constexpr double kProjectiveTolerance = 1e-10;

inline bool projectively_equal(const SpherePoint& a, const SpherePoint& b,
                               double tol = kProjectiveTolerance) {
  return fs_distance(a, b) <= tol;
}

}  // namespace ruelle
