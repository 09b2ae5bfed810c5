#pragma once

#include <array>
#include <cstddef>
#include <new>
#include <span>

#include "ruelle/sphere_point.hpp"

namespace ruelle {

inline constexpr int kMaxDegree = 16;

/// A root of a homogeneous binary form together with its multiplicity.
struct ProjectiveRoot {
  SpherePoint point;
  int multiplicity = 1;
};

/// Fixed-capacity root list; avoids heap traffic in tree expansion and chains.
class RootSet {
 public:
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  const ProjectiveRoot& operator[](std::size_t i) const { return store_.roots[i]; }
  ProjectiveRoot& operator[](std::size_t i) { return store_.roots[i]; }
  const ProjectiveRoot* begin() const { return store_.roots; }
  const ProjectiveRoot* end() const { return store_.roots + size_; }
  void push_back(const ProjectiveRoot& r) { new (&store_.roots[size_++]) ProjectiveRoot(r); }
  int total_multiplicity() const;

 private:
  // Left uninitialized; entries past size_ are never read.
  union Storage {
    Storage() {}
    ProjectiveRoot roots[kMaxDegree];
  } store_;
  std::size_t size_ = 0;
};

struct RootOptions {
  int max_iterations = 500;
  /// Roots closer than this (chordal) are merged with summed multiplicity.
  double cluster_radius = 1e-7;
};

/// Roots on P^1 of the binary form sum_k coeffs[k] z0^k z1^(d-k), where
/// d = coeffs.size() - 1. The affine polynomial is solved in whichever chart
/// (z0/z1 or z1/z0) has the larger extreme coefficient; degree 2 uses the
/// cancellation-free quadratic formula, higher degrees Aberth-Ehrlich.
/// Throws RootFindingFailure if the iteration does not converge.
RootSet homogeneous_roots(std::span<const cplx> coeffs, const RootOptions& opts = {});

/// Aberth-Ehrlich simultaneous iteration on an affine polynomial with
/// coefficients a[0] + a[1] t + ... + a[n] t^n (a[n] != 0). Writes n roots.
/// Returns false if the iteration cap was hit with a large backward error.
bool aberth_roots(std::span<const cplx> a, std::span<cplx> roots, int max_iterations);

}  // namespace ruelle
