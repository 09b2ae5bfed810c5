#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ruelle/mesh.hpp"
#include "ruelle/sphere_point.hpp"

namespace ruelle {

class RationalMap;

/// A real- or complex-valued function on the sphere: weights, observables,
/// densities. Either closed-form or sampled on a Mesh and interpolated.
/// Immutable and cheap to copy.
class ScalarField {
 public:
  enum class Kind { closed_form, mesh_sampled };
  using RealFn = std::function<double(const SpherePoint&)>;
  using ComplexFn = std::function<cplx(const SpherePoint&)>;

  /// The zero field.
  ScalarField();

  static ScalarField constant(double c, std::string label = {});
  static ScalarField real(std::string label, RealFn fn);
  static ScalarField complex(std::string label, ComplexFn fn);
  static ScalarField sampled(std::shared_ptr<const Mesh> mesh, std::vector<double> values,
                             std::string label = {});
  static ScalarField sampled(std::shared_ptr<const Mesh> mesh, std::vector<cplx> values,
                             std::string label = {});

  /// Real part of the value.
  double operator()(const SpherePoint& x) const;
  cplx complex_at(const SpherePoint& x) const;

  Kind kind() const;
  bool is_complex() const;
  std::optional<double> constant_value() const;
  const std::string& label() const;

  /// Mesh and node values of a sampled field (empty otherwise).
  const std::shared_ptr<const Mesh>& mesh() const;
  std::span<const double> real_samples() const;
  std::span<const cplx> complex_samples() const;

  ScalarField with_label(std::string label) const;

  /// Values at every node of the mesh.
  std::vector<double> sample_real(const Mesh& mesh) const;
  std::vector<cplx> sample_complex(const Mesh& mesh) const;

  struct Impl;

 private:
  explicit ScalarField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double c, const ScalarField& a);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField shifted(const ScalarField& a, double c);
/// g o f.
ScalarField compose(const ScalarField& g, const RationalMap& f);

/// Registered closed-form fields, addressed by name from corpus and config
/// files. Every entry takes an optional "amplitude" (default 1).
///
///   zero, constant(value), cos_re (X coordinate; Re z on |z|=1),
///   cos_mode(m), sin_mode(m), height (|z|^2/(1+|z|^2)),
///   dyadic_tail(terms, ratio): sum_{j<terms} ratio^j cos(2^j angle),
///   abs_sin, chord_to_one (chordal distance to z=1), pos_cos (max(cos, 0)),
///   log_cusp (1/(1+|log|angle||))
ScalarField make_field(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> registered_fields();

}  // namespace ruelle
