#include "ruelle/sphere_point.hpp"

#include <algorithm>
#include <cmath>

#include "ruelle/error.hpp"

namespace ruelle {

SpherePoint::SpherePoint(cplx z0, cplx z1) {
  double n0 = std::norm(z0);
  double n1 = std::norm(z1);
  double total = n0 + n1;
  if (!(total > 1e-280 && total < 1e280)) {
    // Rescale first so the squared moduli neither overflow nor underflow.
    const double a0 = std::abs(z0);
    const double a1 = std::abs(z1);
    if (!(a0 > 0.0 || a1 > 0.0) || !std::isfinite(a0) || !std::isfinite(a1)) {
      throw InputError("SpherePoint: coordinates must be finite and not both zero");
    }
    const double m = std::max(a0, a1);
    z0 /= m;
    z1 /= m;
    n0 = std::norm(z0);
    n1 = std::norm(z1);
    total = n0 + n1;
  }
  // Rotate the phase so the dominant coordinate is real positive, then scale.
  const double norm = std::sqrt(total);
  if (n1 >= n0) {
    const double a1 = std::sqrt(n1);
    const cplx phase = std::conj(z1) / a1;
    z0_ = z0 * phase / norm;
    z1_ = cplx(a1 / norm, 0.0);
  } else {
    const double a0 = std::sqrt(n0);
    const cplx phase = std::conj(z0) / a0;
    z0_ = cplx(a0 / norm, 0.0);
    z1_ = z1 * phase / norm;
  }
}

SpherePoint SpherePoint::from_affine(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return infinity();
  return SpherePoint(z, cplx(1.0));
}

SpherePoint SpherePoint::on_circle(double angle) {
  const double r = std::sqrt(0.5);
  return SpherePoint(cplx(r * std::cos(angle), r * std::sin(angle)), cplx(r, 0.0), Raw{});
}

cplx SpherePoint::affine() const {
  if (z1_ == 0.0) return cplx(std::numeric_limits<double>::max(), 0.0);
  return z0_ / z1_;
}

double SpherePoint::angle() const { return std::arg(z0_) - std::arg(z1_); }

double SpherePoint::x() const { return 2.0 * (z0_ * std::conj(z1_)).real(); }
double SpherePoint::y() const { return 2.0 * (z0_ * std::conj(z1_)).imag(); }
double SpherePoint::height() const { return std::norm(z0_) - std::norm(z1_); }

}  // namespace ruelle
