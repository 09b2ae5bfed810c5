#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ruelle/scalar_field.hpp"
#include "ruelle/sphere_point.hpp"

namespace ruelle {

struct Atom {
  SpherePoint point;
  double weight = 0.0;
};

/// A finite weighted point set approximating a measure on the sphere.
struct EmpiricalMeasure {
  std::vector<Atom> atoms;
  bool normalized = false;
  /// Total weight before normalization (for conformal measures built from a
  /// backward tree this is lambda^{-n} L^n 1 at the seed).
  double raw_mass = 0.0;

  std::size_t size() const { return atoms.size(); }
  double total_weight() const;
  void normalize();

  double expectation(const ScalarField& g) const;
  cplx expectation_complex(const ScalarField& g) const;

  /// Systematic resampling to `count` equal-weight atoms carrying the same
  /// total weight. Deterministic in the seed.
  EmpiricalMeasure resample(std::size_t count, std::uint64_t seed) const;

  /// Columns re, im, weight, chart_id: the point in the affine chart z
  /// (chart 0) when |z| <= 1, otherwise in w = 1/z (chart 1).
  void write_csv(const std::string& path) const;
};

}  // namespace ruelle
