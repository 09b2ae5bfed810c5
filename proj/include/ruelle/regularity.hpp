#pragma once

#include <utility>
#include <vector>

#include "ruelle/mesh.hpp"
#include "ruelle/rational_map.hpp"
#include "ruelle/scalar_field.hpp"

namespace ruelle {

struct RegularityReport {
  double oscillation = 0.0;
  std::vector<std::pair<double, double>> modulus;  ///< (r, m(g, r)), r increasing
  double p = 0.0;
  double logp_seminorm = 0.0;  ///< lower bound at mesh scale
  double mesh_gap = 0.0;       ///< max nearest-neighbour gap of the mesh used
  bool admissible = false;
  double oscillation_margin = 0.0;  ///< log d - oscillation
};

/// max g - min g over the mesh nodes.
double oscillation(const ScalarField& g, const Mesh& mesh);

/// sup |g(x) - g(y)| over node pairs with fs_distance(x, y) <= r. Pairs are
/// found by bucketing the nodes in R^3 at scale r, so the cost is roughly
/// N times the number of nodes in an r-ball.
double modulus_of_continuity(const ScalarField& g, const Mesh& mesh, double r);

/// Modulus at each radius in `radii` (sorted ascending in the output).
std::vector<std::pair<double, double>> modulus_table(const ScalarField& g, const Mesh& mesh,
                                                     std::vector<double> radii);

/// sup over node pairs of |g(a) - g(b)| (1 + |log dist(a, b)|)^p. A lower
/// bound for the continuum semi-norm; pairs closer than the mesh gap are not
/// sampled.
double logp_seminorm(const ScalarField& g, const Mesh& mesh, double p);

/// Oscillation below log d and a finite log^q semi-norm at mesh scale.
RegularityReport admissibility_check(const ScalarField& phi, const RationalMap& f, const Mesh& mesh, double q);

struct MollifyBounds {
  double nu = 0.0;          ///< bump radius eps^(1/gamma)
  double sup_g2 = 0.0;      ///< measured on the probe mesh
  double c1_norm_g1 = 0.0;  ///< sup |g1| + finite-difference sup |grad g1|
  double sup_g = 0.0;
  /// sup_g2 / eps, the constant in the C^gamma bound.
  double g2_constant = 0.0;
  /// c1_norm_g1 / (sup_g * (1/eps)^(s/gamma)), the constant in the C^s bound.
  double g1_constant = 0.0;
};

struct MollifySplit {
  ScalarField g1;
  ScalarField g2;
  MollifyBounds bounds;
};

/// g = g1 + g2 with g1 the convolution of g with the bump (1 - |u|^2)^4 at
/// radius nu = eps^(1/gamma). On a circle mesh the convolution is in the
/// angle; on a sphere mesh it is taken in each affine chart and blended with
/// the chart partition of unity. g1 and g2 are sampled on `probe`, so
/// g1 + g2 reproduces g at every node up to one rounding.
MollifySplit mollify_split(const ScalarField& g, double gamma, double s, double eps,
                           std::shared_ptr<const Mesh> probe);

}  // namespace ruelle
