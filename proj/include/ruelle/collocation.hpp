#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ruelle/mesh.hpp"
#include "ruelle/rational_map.hpp"
#include "ruelle/scalar_field.hpp"

namespace ruelle {

/// Mesh discretization of h -> sum_{f(a) = y} mult(a) e^{phi(a) + theta g(a)} h(a)
/// at the nodes y, with h interpolated at the preimages. Stored as a sparse
/// row matrix; real when theta is real.
class Collocation {
 public:
  Collocation(const RationalMap& f, const ScalarField& weight, std::shared_ptr<const Mesh> mesh,
              cplx theta = 0.0, const ScalarField& observable = ScalarField(), const RootOptions& roots = {});

  std::size_t size() const { return row_ptr_.size() - 1; }
  bool is_real() const { return real_; }
  const std::shared_ptr<const Mesh>& mesh() const { return mesh_; }

  void apply(std::span<const cplx> x, std::span<cplx> y) const;
  /// Requires is_real().
  void apply(std::span<const double> x, std::span<double> y) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<std::uint32_t> row_ptr_;
  std::vector<std::uint32_t> col_;
  std::vector<cplx> val_;
  std::vector<double> real_val_;
  bool real_ = true;
};

struct PowerOptions {
  int max_iterations = 2000;
  /// Stop once the eigenvalue changes by less than this (relative) and the
  /// residual is below residual_tolerance.
  double tolerance = 1e-14;
  double residual_tolerance = 1e-10;
};

struct EigenPair {
  cplx value;
  /// Eigenvector normalized to 1 at `reference`.
  std::vector<cplx> vector;
  std::size_t reference = 0;
  /// sup |A v / scale - value v| with v as stored.
  double residual = 0.0;
  int iterations = 0;
};

/// Dominant eigenpair of op / scale by power iteration. The eigenvalue is the
/// quadrature-weighted Rayleigh ratio. Throws NoDominantEigenvalue when the
/// iteration does not settle within the cap.
EigenPair power_iteration(const Collocation& op, double scale, const PowerOptions& opts = {},
                          std::vector<cplx> start = {});

}  // namespace ruelle
