#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ruelle/sphere_point.hpp"

namespace ruelle {

/// Interpolation weights of a point against mesh nodes.
struct Stencil {
  static constexpr int kCapacity = 32;
  // Only the first `size` entries are meaningful.
  std::array<std::uint32_t, kCapacity> index;
  std::array<double, kCapacity> weight;
  int size = 0;
};

/// Discretization substrate for mesh-sampled fields.
///
/// circle: 2 * resolution equally spaced nodes on |z| = 1, periodic cubic
///   Lagrange interpolation in the angle, uniform quadrature.
/// sphere_two_chart: two square grids of spacing 2 / resolution covering the
///   discs |z| <= 1.05 and |w| <= 1.05 (w = 1/z), bicubic Lagrange
///   interpolation in each chart, blended by a smooth partition of unity on
///   the overlap band. Quadrature is the normalized Fubini-Study area; nodes
///   outside the partition-of-unity support carry zero weight.
class Mesh {
 public:
  enum class Kind { circle, sphere_two_chart };

  static std::shared_ptr<const Mesh> circle(int resolution);
  static std::shared_ptr<const Mesh> sphere(int resolution);

  Kind kind() const { return kind_; }
  int resolution() const { return resolution_; }
  std::size_t size() const { return nodes_.size(); }
  std::span<const SpherePoint> nodes() const { return nodes_; }
  const SpherePoint& node(std::size_t i) const { return nodes_[i]; }
  std::span<const double> quadrature_weights() const { return quadrature_; }

  Stencil stencil(const SpherePoint& x) const;
  double interpolate(std::span<const double> values, const SpherePoint& x) const;
  cplx interpolate(std::span<const cplx> values, const SpherePoint& x) const;

  /// Largest distance from a node to its nearest grid neighbour (chordal).
  double max_neighbor_gap() const;

  /// Grid spacing in the chart (or angle, for the circle).
  double spacing() const { return spacing_; }

  /// Weight of chart 0 in the blended interpolant at x (sphere meshes).
  static double chart0_weight(const SpherePoint& x);

 private:
  Mesh() = default;
  void append_cubic(Stencil& s, int chart, double a, double b, double scale) const;

  Kind kind_ = Kind::circle;
  int resolution_ = 0;
  double spacing_ = 0.0;
  int half_ = 0;      // sphere: nodes per axis = 2 * half_ + 1
  int per_axis_ = 0;
  std::vector<SpherePoint> nodes_;
  std::vector<double> quadrature_;
};

}  // namespace ruelle
