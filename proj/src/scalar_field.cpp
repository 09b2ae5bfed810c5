#include "ruelle/scalar_field.hpp"

#include <cmath>
#include <numbers>

#include "ruelle/error.hpp"
#include "ruelle/rational_map.hpp"

namespace ruelle {

struct ScalarField::Impl {
  Kind kind = Kind::closed_form;
  bool complex_valued = false;
  std::optional<double> constant;
  std::string label;
  RealFn real_fn;
  ComplexFn complex_fn;
  std::shared_ptr<const Mesh> mesh;
  std::vector<double> real_values;
  std::vector<cplx> complex_values;
};

namespace {

std::shared_ptr<ScalarField::Impl> make_impl(std::string label) {
  auto impl = std::make_shared<ScalarField::Impl>();
  impl->label = std::move(label);
  return impl;
}

}  // namespace

ScalarField::ScalarField() : ScalarField(constant(0.0, "zero")) {}

ScalarField ScalarField::constant(double c, std::string label) {
  auto impl = make_impl(label.empty() ? "constant" : std::move(label));
  impl->constant = c;
  impl->real_fn = [c](const SpherePoint&) { return c; };
  return ScalarField(std::move(impl));
}

ScalarField ScalarField::real(std::string label, RealFn fn) {
  auto impl = make_impl(std::move(label));
  impl->real_fn = std::move(fn);
  return ScalarField(std::move(impl));
}

ScalarField ScalarField::complex(std::string label, ComplexFn fn) {
  auto impl = make_impl(std::move(label));
  impl->complex_valued = true;
  impl->complex_fn = std::move(fn);
  return ScalarField(std::move(impl));
}

ScalarField ScalarField::sampled(std::shared_ptr<const Mesh> mesh, std::vector<double> values, std::string label) {
  if (!mesh || values.size() != mesh->size()) throw InputError("ScalarField::sampled: value count must match mesh");
  auto impl = make_impl(std::move(label));
  impl->kind = Kind::mesh_sampled;
  impl->mesh = std::move(mesh);
  impl->real_values = std::move(values);
  return ScalarField(std::move(impl));
}

ScalarField ScalarField::sampled(std::shared_ptr<const Mesh> mesh, std::vector<cplx> values, std::string label) {
  if (!mesh || values.size() != mesh->size()) throw InputError("ScalarField::sampled: value count must match mesh");
  auto impl = make_impl(std::move(label));
  impl->kind = Kind::mesh_sampled;
  impl->complex_valued = true;
  impl->mesh = std::move(mesh);
  impl->complex_values = std::move(values);
  return ScalarField(std::move(impl));
}

double ScalarField::operator()(const SpherePoint& x) const {
  const Impl& f = *impl_;
  if (f.kind == Kind::mesh_sampled) {
    return f.complex_valued ? f.mesh->interpolate(std::span<const cplx>(f.complex_values), x).real()
                            : f.mesh->interpolate(std::span<const double>(f.real_values), x);
  }
  return f.complex_valued ? f.complex_fn(x).real() : f.real_fn(x);
}

cplx ScalarField::complex_at(const SpherePoint& x) const {
  const Impl& f = *impl_;
  if (f.kind == Kind::mesh_sampled) {
    return f.complex_valued ? f.mesh->interpolate(std::span<const cplx>(f.complex_values), x)
                            : cplx(f.mesh->interpolate(std::span<const double>(f.real_values), x));
  }
  return f.complex_valued ? f.complex_fn(x) : cplx(f.real_fn(x));
}

ScalarField::Kind ScalarField::kind() const { return impl_->kind; }
bool ScalarField::is_complex() const { return impl_->complex_valued; }
std::optional<double> ScalarField::constant_value() const { return impl_->constant; }
const std::string& ScalarField::label() const { return impl_->label; }
const std::shared_ptr<const Mesh>& ScalarField::mesh() const { return impl_->mesh; }
std::span<const double> ScalarField::real_samples() const { return impl_->real_values; }
std::span<const cplx> ScalarField::complex_samples() const { return impl_->complex_values; }

ScalarField ScalarField::with_label(std::string label) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->label = std::move(label);
  return ScalarField(std::move(impl));
}

std::vector<double> ScalarField::sample_real(const Mesh& mesh) const {
  if (impl_->kind == Kind::mesh_sampled && impl_->mesh.get() == &mesh && !impl_->complex_valued) {
    return impl_->real_values;
  }
  std::vector<double> out(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) out[i] = (*this)(mesh.node(i));
  return out;
}

std::vector<cplx> ScalarField::sample_complex(const Mesh& mesh) const {
  std::vector<cplx> out(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) out[i] = complex_at(mesh.node(i));
  return out;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  const std::string label = a.label() + "+" + b.label();
  if (a.constant_value() && b.constant_value()) return ScalarField::constant(*a.constant_value() + *b.constant_value(), label);
  if (a.is_complex() || b.is_complex()) {
    return ScalarField::complex(label, [a, b](const SpherePoint& x) { return a.complex_at(x) + b.complex_at(x); });
  }
  return ScalarField::real(label, [a, b](const SpherePoint& x) { return a(x) + b(x); });
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  const std::string label = a.label() + "-" + b.label();
  if (a.constant_value() && b.constant_value()) return ScalarField::constant(*a.constant_value() - *b.constant_value(), label);
  if (a.is_complex() || b.is_complex()) {
    return ScalarField::complex(label, [a, b](const SpherePoint& x) { return a.complex_at(x) - b.complex_at(x); });
  }
  return ScalarField::real(label, [a, b](const SpherePoint& x) { return a(x) - b(x); });
}

ScalarField operator*(double c, const ScalarField& a) {
  const std::string label = std::to_string(c) + "*" + a.label();
  if (a.constant_value()) return ScalarField::constant(c * *a.constant_value(), label);
  if (a.is_complex()) return ScalarField::complex(label, [c, a](const SpherePoint& x) { return c * a.complex_at(x); });
  return ScalarField::real(label, [c, a](const SpherePoint& x) { return c * a(x); });
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  const std::string label = a.label() + "*" + b.label();
  if (a.is_complex() || b.is_complex()) {
    return ScalarField::complex(label, [a, b](const SpherePoint& x) { return a.complex_at(x) * b.complex_at(x); });
  }
  return ScalarField::real(label, [a, b](const SpherePoint& x) { return a(x) * b(x); });
}

ScalarField shifted(const ScalarField& a, double c) { return a + ScalarField::constant(c); }

ScalarField compose(const ScalarField& g, const RationalMap& f) {
  const std::string label = g.label() + "∘f";
  if (g.constant_value()) return g.with_label(label);
  if (g.is_complex()) {
    return ScalarField::complex(label, [g, f](const SpherePoint& x) { return g.complex_at(f(x)); });
  }
  return ScalarField::real(label, [g, f](const SpherePoint& x) { return g(f(x)); });
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

}  // namespace

std::vector<std::string> registered_fields() {
  return {"zero", "constant", "cos_re", "cos_mode", "sin_mode", "height", "dyadic_tail",
          "abs_sin", "chord_to_one", "pos_cos", "log_cusp"};
}

ScalarField make_field(const std::string& name, const std::map<std::string, double>& params) {
  const double amp = param(params, "amplitude", 1.0);
  if (name == "zero") return ScalarField::constant(0.0, "zero");
  if (name == "constant") return ScalarField::constant(amp * param(params, "value", 1.0), "constant");
  if (name == "cos_re") {
    return ScalarField::real("cos_re", [amp](const SpherePoint& x) { return amp * x.x(); });
  }
  if (name == "height") {
    return ScalarField::real("height", [amp](const SpherePoint& x) { return amp * std::norm(x.z0()); });
  }
  if (name == "cos_mode" || name == "sin_mode") {
    const double m = param(params, "m", 1.0);
    if (name == "cos_mode") {
      return ScalarField::real("cos_mode", [amp, m](const SpherePoint& x) { return amp * std::cos(m * x.angle()); });
    }
    return ScalarField::real("sin_mode", [amp, m](const SpherePoint& x) { return amp * std::sin(m * x.angle()); });
  }
  if (name == "dyadic_tail") {
    const int terms = static_cast<int>(param(params, "terms", 48));
    const double ratio = param(params, "ratio", 0.5);
    return ScalarField::real("dyadic_tail", [amp, terms, ratio](const SpherePoint& x) {
      const double t = x.angle();
      double acc = 0.0, c = 1.0, freq = 1.0;
      for (int j = 0; j < terms; ++j) {
        acc += c * std::cos(freq * t);
        c *= ratio;
        freq *= 2.0;
      }
      return amp * acc;
    });
  }
  if (name == "abs_sin") {
    return ScalarField::real("abs_sin", [amp](const SpherePoint& x) { return amp * std::abs(std::sin(x.angle())); });
  }
  if (name == "chord_to_one") {
    const SpherePoint one = SpherePoint::from_affine(1.0);
    return ScalarField::real("chord_to_one", [amp, one](const SpherePoint& x) { return amp * fs_distance(x, one); });
  }
  if (name == "pos_cos") {
    return ScalarField::real("pos_cos", [amp](const SpherePoint& x) { return amp * std::max(0.0, std::cos(x.angle())); });
  }
  if (name == "log_cusp") {
    return ScalarField::real("log_cusp", [amp](const SpherePoint& x) {
      const double t = std::abs(x.angle());
      return t == 0.0 ? 0.0 : amp / (1.0 + std::abs(std::log(t)));
    });
  }
  throw InputError("make_field: unknown field '" + name + "'");
}

}  // namespace ruelle
