#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "ruelle/backward_tree.hpp"
#include "ruelle/collocation.hpp"
#include "ruelle/fit.hpp"
#include "ruelle/measure.hpp"
#include "ruelle/mesh.hpp"
#include "ruelle/rational_map.hpp"
#include "ruelle/scalar_field.hpp"

namespace ruelle {

enum class LambdaMethod { ratio, root, mesh_power };

const char* to_string(LambdaMethod m);

struct TransferOptions {
  /// Depth of the ratio and root estimators of lambda.
  int lambda_depth = 16;
  /// Julia base points for the ratio estimator (median taken).
  int base_points = 8;
  /// Depth of lambda^{-n} L^n 1 used for the density.
  int rho_depth = 12;
  /// Depth of the streamed conformal measure used for expectations and for
  /// the equilibrium quadrature weights.
  int measure_depth = 20;
  /// Depth of the stored atoms of the conformal measure.
  int atom_depth = 14;
  /// Cap on stored atoms (0 = none); the expansion resamples when it binds.
  std::size_t atom_budget = 0;
  double consistency_tolerance = 1e-6;
  std::uint64_t seed = 1;
  TreeOptions tree;
  PowerOptions power;
  /// Methods run during calibration; the reported lambda is the ratio value
  /// when present.
  std::set<LambdaMethod> lambda_methods = {LambdaMethod::ratio};
};

struct LambdaEstimate {
  double value = 0.0;
  std::optional<double> ratio;
  std::optional<double> root;
  std::optional<double> mesh_power;
  std::vector<double> ratio_by_base_point;
  /// Largest relative difference between any two methods.
  double discrepancy = 0.0;
  int depth = 0;
};

struct RhoEstimate {
  ScalarField rho;
  /// sup over nodes of |rho_n - rho_{n-1}|.
  double residual = 0.0;
  int depth = 0;
};

struct CalibrationReport {
  LambdaEstimate lambda;
  double rho_residual = 0.0;
  int rho_depth = 0;
  /// <m, rho_n> before rescaling.
  double rho_mass = 0.0;
  /// max over nodes |L 1 - 1| for the normalized operator.
  double normalization_defect = 0.0;
  int measure_depth = 0;
  std::size_t atoms = 0;
};

/// A map, a potential and a mesh, together with the calibrated leading
/// eigendata lambda, rho and m. Calibration happens once; afterwards the
/// context is read-only and safe to share between threads.
class TransferContext {
 public:
  TransferContext(RationalMap f, ScalarField weight, std::shared_ptr<const Mesh> mesh, TransferOptions opts = {});

  /// Estimates lambda, rho and m, and normalizes rho so that <m, rho> = 1.
  void calibrate();

  const RationalMap& map() const { return f_; }
  const ScalarField& weight() const { return weight_; }
  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const TransferOptions& options() const { return opts_; }
  bool circle_system() const { return mesh_->kind() == Mesh::Kind::circle; }
  const std::vector<SpherePoint>& base_points() const { return base_points_; }

  bool has_lambda() const { return lambda_.has_value(); }
  bool calibrated() const { return calibrated_; }
  double lambda() const;
  const ScalarField& rho() const;
  /// Stored atoms of the conformal measure (atom_depth).
  const EmpiricalMeasure& conformal_measure() const;
  /// Node weights q with sum_j q_j v_j = <m, rho * interp(v)>, streamed at
  /// measure_depth. They sum to 1.
  const std::vector<double>& equilibrium_weights() const;
  const CalibrationReport& report() const { return report_; }

  /// Depths clipped so that d^n fits the leaf budget.
  int affordable_depth(int requested) const;

 private:
  RationalMap f_;
  ScalarField weight_;
  std::shared_ptr<const Mesh> mesh_;
  TransferOptions opts_;
  std::vector<SpherePoint> base_points_;
  std::optional<double> lambda_;
  ScalarField rho_;
  EmpiricalMeasure measure_;
  std::vector<double> equilibrium_weights_;
  CalibrationReport report_;
  bool calibrated_ = false;
};

/// Julia points: random points of the unit circle when `circle` is set,
/// otherwise endpoints of random backward orbits of a generic point.
std::vector<SpherePoint> julia_points(const RationalMap& f, bool circle, std::size_t count, std::uint64_t seed,
                                      int backward_steps = 48);

/// One application of the unnormalized operator at y.
double apply_L(const TransferContext& ctx, const ScalarField& g, const SpherePoint& y);
cplx apply_L_complex(const TransferContext& ctx, const ScalarField& g, const SpherePoint& y);

/// L^n g (y) by a walk over the depth-n backward tree.
double apply_Ln(const TransferContext& ctx, const ScalarField& g, const SpherePoint& y, int n);
cplx apply_Ln_complex(const TransferContext& ctx, const ScalarField& g, const SpherePoint& y, int n);

/// L^k g (y) for k = 0..n_max in a single walk.
std::vector<double> apply_Ln_series(const TransferContext& ctx, const ScalarField& g, const SpherePoint& y,
                                    int n_max);

/// L_[theta]^k h (y) for k = 0..n_max, where L_[theta] carries the extra
/// factor e^{theta g}.
std::vector<cplx> twisted_series(const TransferContext& ctx, const ScalarField& g, cplx theta,
                                 const ScalarField& h, const SpherePoint& y, int n_max);

/// Runs the requested estimators; throws InconsistentEstimates when two of
/// them differ by more than the consistency tolerance (relative).
LambdaEstimate estimate_lambda(const TransferContext& ctx, const std::set<LambdaMethod>& methods);

/// lambda^{-n} L^n 1 at the nodes of `mesh` (not yet normalized against m).
RhoEstimate estimate_rho(const TransferContext& ctx, std::shared_ptr<const Mesh> mesh, int n);

/// Weighted atoms of the depth-n backward tree of `seed`, each with weight
/// lambda^{-n} e^{S_n phi} times multiplicity, normalized. With an atom
/// budget the expansion resamples level by level.
EmpiricalMeasure estimate_conformal_measure(const TransferContext& ctx, const SpherePoint& seed, int n,
                                            std::size_t atom_budget = 0);

double pressure(const TransferContext& ctx);

struct Expectation {
  double value = 0.0;
  /// |E_n - E_{n-1}| between the last two depths.
  double change = 0.0;
};

/// <m, g>, streamed over the depth-n tree of the first base point
/// (n = measure_depth when 0).
Expectation conformal_expectation(const TransferContext& ctx, const ScalarField& g, int n = 0);

/// <mu, g> = <m, rho g>. Fields sampled on the context mesh (and raw node
/// values) go through the equilibrium quadrature weights; closed-form fields
/// are evaluated at the streamed atoms.
double equilibrium_expectation(const TransferContext& ctx, const ScalarField& g);
double equilibrium_expectation(const TransferContext& ctx, std::span<const double> node_values);

/// Normalized operator L g = (lambda rho)^{-1} L(rho g), iterated by tree
/// walks: out[k][j] = L^k g at node j, k = 0..n_max.
std::vector<std::vector<double>> normalized_series(const TransferContext& ctx, const ScalarField& g, int n_max);

struct EquidistributionResult {
  std::vector<double> series;  ///< e_n, n = 0..n_max
  double mean = 0.0;           ///< <m, g>
  double mean_change = 0.0;
  DecayFit fit;
};

/// e_n = |lambda^{-n} L^n g (x) - rho(x) <m, g>| and its fitted decay rate.
EquidistributionResult equidistribution_rate(const TransferContext& ctx, const ScalarField& g,
                                             const SpherePoint& x, int n_max);

}  // namespace ruelle
