#include "ruelle/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ruelle/error.hpp"
#include "ruelle/parallel.hpp"
#include "ruelle/rng.hpp"

namespace ruelle {

const char* to_string(LambdaMethod m) {
  switch (m) {
    case LambdaMethod::ratio: return "ratio";
    case LambdaMethod::root: return "root";
    case LambdaMethod::mesh_power: return "mesh_power";
  }
  return "?";
}

namespace {

template <class T>
struct Series {
  std::vector<T> v;
  Series& operator+=(const Series& o) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
    return *this;
  }
};

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// rho at a node of its own mesh, without interpolation.
double node_value(const ScalarField& field, std::size_t j, const SpherePoint& p) {
  if (auto c = field.constant_value()) return *c;
  if (field.kind() == ScalarField::Kind::mesh_sampled) return field.real_samples()[j];
  return field(p);
}

void check_circle_invariant(const RationalMap& f) {
  for (int k = 0; k < 7; ++k) {
    const SpherePoint y = SpherePoint::on_circle(0.37 + 0.9 * k);
    const double r = std::abs(f(y).affine());
    bool ok = std::abs(r - 1.0) <= 1e-9;
    for (const auto& pre : f.preimages(y)) ok = ok && std::abs(std::abs(pre.point.affine()) - 1.0) <= 1e-9;
    if (!ok) throw PreconditionViolation("circle mesh requires a map preserving the unit circle");
  }
}

}  // namespace

std::vector<SpherePoint> julia_points(const RationalMap& f, bool circle, std::size_t count, std::uint64_t seed,
                                      int backward_steps) {
  std::vector<SpherePoint> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    StreamRng rng(seed, 0x4a756c6961ULL + k);
    if (circle) {
      out.push_back(SpherePoint::on_circle(2.0 * std::numbers::pi * rng.uniform()));
      continue;
    }
    SpherePoint y = SpherePoint::from_affine(cplx(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0));
    for (int s = 0; s < backward_steps; ++s) {
      const RootSet pre = f.preimages(y);
      const auto pick = std::min<std::size_t>(pre.size() - 1, static_cast<std::size_t>(rng.uniform() * pre.size()));
      y = pre[pick].point;
    }
    out.push_back(y);
  }
  return out;
}

TransferContext::TransferContext(RationalMap f, ScalarField weight, std::shared_ptr<const Mesh> mesh,
                                 TransferOptions opts)
    : f_(std::move(f)), weight_(std::move(weight)), mesh_(std::move(mesh)), opts_(std::move(opts)) {
  if (!mesh_) throw PreconditionViolation("TransferContext: mesh is required");
  if (weight_.is_complex()) throw PreconditionViolation("TransferContext: potential must be real");
  if (opts_.base_points < 1) throw PreconditionViolation("TransferContext: need at least one base point");
  if (circle_system()) check_circle_invariant(f_);
  base_points_ = julia_points(f_, circle_system(), static_cast<std::size_t>(opts_.base_points), opts_.seed);
}

int TransferContext::affordable_depth(int requested) const {
  int n = 0;
  double leaves = 1.0;
  while (n < requested && leaves * f_.degree() <= static_cast<double>(opts_.tree.leaf_budget)) {
    leaves *= f_.degree();
    ++n;
  }
  return n;
}

double TransferContext::lambda() const {
  if (!lambda_) throw PreconditionViolation("TransferContext: lambda not estimated yet");
  return *lambda_;
}

const ScalarField& TransferContext::rho() const {
  if (!calibrated_) throw PreconditionViolation("TransferContext: not calibrated");
  return rho_;
}

const EmpiricalMeasure& TransferContext::conformal_measure() const {
  if (!calibrated_) throw PreconditionViolation("TransferContext: not calibrated");
  return measure_;
}

const std::vector<double>& TransferContext::equilibrium_weights() const {
  if (!calibrated_) throw PreconditionViolation("TransferContext: not calibrated");
  return equilibrium_weights_;
}

void TransferContext::calibrate() {
  if (calibrated_) return;
  report_.lambda = estimate_lambda(*this, opts_.lambda_methods);
  lambda_ = report_.lambda.value;

  const RhoEstimate raw = estimate_rho(*this, mesh_, opts_.rho_depth);
  report_.rho_residual = raw.residual;
  report_.rho_depth = raw.depth;
  report_.measure_depth = affordable_depth(opts_.measure_depth);

  const double mass = conformal_expectation(*this, raw.rho, report_.measure_depth).value;
  if (!(mass > 0.0)) throw NumericalError("calibrate: <m, rho> is not positive");
  report_.rho_mass = mass;
  if (auto c = raw.rho.constant_value()) {
    rho_ = ScalarField::constant(*c / mass, "rho");
  } else {
    auto values = std::vector<double>(raw.rho.real_samples().begin(), raw.rho.real_samples().end());
    for (auto& v : values) v /= mass;
    rho_ = ScalarField::sampled(mesh_, std::move(values), "rho");
  }

  // Equilibrium quadrature: q_j = sum over leaves of m-weight * rho(a) * stencil_j(a).
  struct Acc {
    std::vector<double> q;
    Acc& operator+=(const Acc& o) {
      for (std::size_t i = 0; i < q.size(); ++i) q[i] += o.q[i];
      return *this;
    }
  };
  const int nm = report_.measure_depth;
  const auto rho_const = rho_.constant_value();
  const Mesh& mesh = *mesh_;
  std::span<const double> rho_vals = rho_const ? std::span<const double>() : rho_.real_samples();
  Acc acc = reduce_tree(f_, weight_, base_points_[0], nm, opts_.tree, Acc{std::vector<double>(mesh.size(), 0.0)},
                        [&](Acc& a, const TreeNode& node) {
                          if (node.depth != nm) return;
                          const double w = static_cast<double>(node.multiplicity) * std::exp(node.log_weight);
                          const Stencil s = mesh.stencil(node.point);
                          double r = 0.0;
                          if (rho_const) {
                            r = *rho_const;
                          } else {
                            for (int k = 0; k < s.size; ++k) r += s.weight[k] * rho_vals[s.index[k]];
                          }
                          for (int k = 0; k < s.size; ++k) a.q[s.index[k]] += w * r * s.weight[k];
                        });
  double total = 0.0;
  for (double v : acc.q) total += v;
  for (auto& v : acc.q) v /= total;
  equilibrium_weights_ = std::move(acc.q);

  measure_ = estimate_conformal_measure(*this, base_points_[0], affordable_depth(opts_.atom_depth),
                                        opts_.atom_budget);
  report_.atoms = measure_.size();
  calibrated_ = true;

  double defect = 0.0;
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    const SpherePoint& y = mesh.node(j);
    const double value = apply_L(*this, rho_, y) / (*lambda_ * node_value(rho_, j, y));
    defect = std::max(defect, std::abs(value - 1.0));
  }
  report_.normalization_defect = defect;
}

double apply_L(const TransferContext& ctx, const ScalarField& g, const SpherePoint& y) {
  double s = 0.0;
  for (const auto& r : ctx.map().preimages(y, ctx.options().tree.roots)) {
    s += static_cast<double>(r.multiplicity) * std::exp(ctx.weight()(r.point)) * g(r.point);
  }
  return s;
}

cplx apply_L_complex(const TransferContext& ctx, const ScalarField& g, const SpherePoint& y) {
  cplx s = 0.0;
  for (const auto& r : ctx.map().preimages(y, ctx.options().tree.roots)) {
    s += static_cast<double>(r.multiplicity) * std::exp(ctx.weight()(r.point)) * g.complex_at(r.point);
  }
  return s;
}

std::vector<double> apply_Ln_series(const TransferContext& ctx, const ScalarField& g, const SpherePoint& y,
                                    int n_max) {
  if (n_max < 0) throw PreconditionViolation("apply_Ln_series: negative depth");
  auto acc = reduce_tree(ctx.map(), ctx.weight(), y, n_max, ctx.options().tree,
                         Series<double>{std::vector<double>(n_max + 1, 0.0)},
                         [&](Series<double>& a, const TreeNode& node) {
                           a.v[node.depth] +=
                               static_cast<double>(node.multiplicity) * std::exp(node.log_weight) * g(node.point);
                         });
  return acc.v;
}

std::vector<cplx> twisted_series(const TransferContext& ctx, const ScalarField& g, cplx theta, const ScalarField& h,
                                 const SpherePoint& y, int n_max) {
  if (n_max < 0) throw PreconditionViolation("twisted_series: negative depth");
  auto acc = reduce_tree(
      ctx.map(), ctx.weight(), y, n_max, ctx.options().tree, Series<cplx>{std::vector<cplx>(n_max + 1, 0.0)},
      [&](Series<cplx>& a, const TreeNode& node) {
        a.v[node.depth] += static_cast<double>(node.multiplicity) * std::exp(node.log_weight + node.twist) *
                           h.complex_at(node.point);
      },
      TreeTwist{&g, theta});
  return acc.v;
}

double apply_Ln(const TransferContext& ctx, const ScalarField& g, const SpherePoint& y, int n) {
  return apply_Ln_series(ctx, g, y, n).back();
}

cplx apply_Ln_complex(const TransferContext& ctx, const ScalarField& g, const SpherePoint& y, int n) {
  return twisted_series(ctx, g, 0.0, g, y, n).back();
}

LambdaEstimate estimate_lambda(const TransferContext& ctx, const std::set<LambdaMethod>& methods) {
  if (methods.empty()) throw PreconditionViolation("estimate_lambda: no method requested");
  LambdaEstimate est;
  const TransferOptions& o = ctx.options();
  const bool need_tree = methods.count(LambdaMethod::ratio) || methods.count(LambdaMethod::root);
  if (need_tree) {
    const int n = ctx.affordable_depth(o.lambda_depth + 1) - 1;
    if (n < 2) throw LeafBudgetExceeded("estimate_lambda: leaf budget too small for depth 2");
    est.depth = n;
    const ScalarField one = ScalarField::constant(1.0);
    const auto& bases = ctx.base_points();
    auto series = parallel_map<std::vector<double>>(
        bases.size(), [&](std::size_t i) { return apply_Ln_series(ctx, one, bases[i], n + 1); });
    std::vector<double> ratios, roots;
    for (const auto& s : series) {
      ratios.push_back(s[n + 1] / s[n]);
      const int m = n / 2;
      roots.push_back(std::pow(s[n] / s[m], 1.0 / static_cast<double>(n - m)));
    }
    if (methods.count(LambdaMethod::ratio)) {
      est.ratio = median(ratios);
      est.ratio_by_base_point = ratios;
    }
    if (methods.count(LambdaMethod::root)) est.root = median(roots);
  }
  if (methods.count(LambdaMethod::mesh_power)) {
    const Collocation op(ctx.map(), ctx.weight(), ctx.mesh_ptr(), 0.0, ScalarField(), o.tree.roots);
    est.mesh_power = power_iteration(op, 1.0, o.power).value.real();
  }
  std::vector<double> values;
  for (const auto& v : {est.ratio, est.root, est.mesh_power}) {
    if (v) values.push_back(*v);
  }
  est.value = values.front();
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      est.discrepancy =
          std::max(est.discrepancy, std::abs(values[i] - values[j]) / std::max(values[i], values[j]));
    }
  }
  if (est.discrepancy > o.consistency_tolerance) {
    throw InconsistentEstimates("estimate_lambda: methods disagree by " + std::to_string(est.discrepancy));
  }
  return est;
}

RhoEstimate estimate_rho(const TransferContext& ctx, std::shared_ptr<const Mesh> mesh, int n) {
  if (n < 1) throw PreconditionViolation("estimate_rho: depth must be >= 1");
  const double lambda = ctx.lambda();
  const ScalarField one = ScalarField::constant(1.0);
  struct Pair {
    double current, previous;
  };
  auto vals = parallel_map<Pair>(mesh->size(), [&](std::size_t j) {
    const auto s = apply_Ln_series(ctx, one, mesh->node(j), n);
    return Pair{s[n] / std::pow(lambda, n), s[n - 1] / std::pow(lambda, n - 1)};
  });
  RhoEstimate out;
  out.depth = n;
  std::vector<double> values(vals.size());
  bool constant = true;
  for (std::size_t j = 0; j < vals.size(); ++j) {
    values[j] = vals[j].current;
    out.residual = std::max(out.residual, std::abs(vals[j].current - vals[j].previous));
    constant = constant && values[j] == values[0];
  }
  out.rho = constant ? ScalarField::constant(values[0], "rho") : ScalarField::sampled(mesh, std::move(values), "rho");
  return out;
}

EmpiricalMeasure estimate_conformal_measure(const TransferContext& ctx, const SpherePoint& seed, int n,
                                            std::size_t atom_budget) {
  if (n < 0) throw PreconditionViolation("estimate_conformal_measure: negative depth");
  const double lambda = ctx.lambda();
  if (atom_budget == 0) check_leaf_budget(ctx.map().degree(), n, ctx.options().tree.leaf_budget);
  EmpiricalMeasure m;
  m.atoms.push_back({seed, 1.0});
  for (int level = 1; level <= n; ++level) {
    auto children = parallel_map<std::vector<Atom>>(m.atoms.size(), [&](std::size_t i) {
      std::vector<Atom> out;
      for (const auto& r : ctx.map().preimages(m.atoms[i].point, ctx.options().tree.roots)) {
        out.push_back({r.point, m.atoms[i].weight * static_cast<double>(r.multiplicity) *
                                    std::exp(ctx.weight()(r.point)) / lambda});
      }
      return out;
    });
    EmpiricalMeasure next;
    for (auto& c : children) next.atoms.insert(next.atoms.end(), c.begin(), c.end());
    if (atom_budget > 0 && next.size() > atom_budget) {
      next = next.resample(atom_budget, mix64(ctx.options().seed ^ (0x6d656173ULL + static_cast<std::uint64_t>(level))));
    }
    m = std::move(next);
  }
  m.raw_mass = m.total_weight();
  m.normalize();
  return m;
}

double pressure(const TransferContext& ctx) { return std::log(ctx.lambda()); }

Expectation conformal_expectation(const TransferContext& ctx, const ScalarField& g, int n) {
  if (n == 0) n = ctx.affordable_depth(ctx.options().measure_depth);
  if (n < 1) throw PreconditionViolation("conformal_expectation: depth must be >= 1");
  struct Acc {
    double gw[2] = {0.0, 0.0};
    double w[2] = {0.0, 0.0};
    Acc& operator+=(const Acc& o) {
      for (int i = 0; i < 2; ++i) {
        gw[i] += o.gw[i];
        w[i] += o.w[i];
      }
      return *this;
    }
  };
  const Acc acc = reduce_tree(ctx.map(), ctx.weight(), ctx.base_points()[0], n, ctx.options().tree, Acc{},
                              [&](Acc& a, const TreeNode& node) {
                                const int slot = node.depth - (n - 1);
                                if (slot < 0) return;
                                const double w = static_cast<double>(node.multiplicity) * std::exp(node.log_weight);
                                a.gw[slot] += w * g(node.point);
                                a.w[slot] += w;
                              });
  const double now = acc.gw[1] / acc.w[1];
  const double before = acc.gw[0] / acc.w[0];
  return {now, std::abs(now - before)};
}

double equilibrium_expectation(const TransferContext& ctx, std::span<const double> node_values) {
  const auto& q = ctx.equilibrium_weights();
  if (node_values.size() != q.size()) throw PreconditionViolation("equilibrium_expectation: size mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) s += q[j] * node_values[j];
  return s;
}

double equilibrium_expectation(const TransferContext& ctx, const ScalarField& g) {
  if (g.kind() == ScalarField::Kind::mesh_sampled && g.mesh() == ctx.mesh_ptr() && !g.is_complex()) {
    return equilibrium_expectation(ctx, g.real_samples());
  }
  // Closed-form fields are evaluated exactly at the streamed atoms.
  const ScalarField& rho = ctx.rho();
  const ScalarField product = ScalarField::real("rho*g", [&](const SpherePoint& x) { return rho(x) * g(x); });
  return conformal_expectation(ctx, product, ctx.report().measure_depth).value;
}

std::vector<std::vector<double>> normalized_series(const TransferContext& ctx, const ScalarField& g, int n_max) {
  if (n_max < 0) throw PreconditionViolation("normalized_series: negative depth");
  const ScalarField& rho = ctx.rho();
  const double lambda = ctx.lambda();
  const Mesh& mesh = ctx.mesh();
  const auto rho_const = rho.constant_value();
  auto per_node = parallel_map<std::vector<double>>(mesh.size(), [&](std::size_t j) {
    auto acc = reduce_tree(ctx.map(), ctx.weight(), mesh.node(j), n_max, ctx.options().tree,
                           Series<double>{std::vector<double>(n_max + 1, 0.0)},
                           [&](Series<double>& a, const TreeNode& node) {
                             const double r = rho_const ? *rho_const : rho(node.point);
                             a.v[node.depth] += static_cast<double>(node.multiplicity) * std::exp(node.log_weight) *
                                                r * g(node.point);
                           });
    const double ry = node_value(rho, j, mesh.node(j));
    for (int k = 0; k <= n_max; ++k) acc.v[k] /= std::pow(lambda, k) * ry;
    // The k = 0 entry is g itself, not an interpolated round trip.
    acc.v[0] = g(mesh.node(j));
    return acc.v;
  });
  std::vector<std::vector<double>> out(n_max + 1, std::vector<double>(mesh.size()));
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    for (int k = 0; k <= n_max; ++k) out[k][j] = per_node[j][k];
  }
  return out;
}

EquidistributionResult equidistribution_rate(const TransferContext& ctx, const ScalarField& g, const SpherePoint& x,
                                             int n_max) {
  EquidistributionResult out;
  const Expectation mean = conformal_expectation(ctx, g);
  out.mean = mean.value;
  out.mean_change = mean.change;
  const auto s = apply_Ln_series(ctx, g, x, n_max);
  const double rx = ctx.rho()(x);
  double scale = 0.0;
  for (int k = 0; k <= n_max; ++k) {
    out.series.push_back(std::abs(s[k] / std::pow(ctx.lambda(), k) - rx * out.mean));
    scale = std::max(scale, out.series.back());
  }
  DecayFitOptions fopts;
  fopts.floor = std::max(1e-13 * scale, mean.change * std::abs(rx));
  out.fit = fit_decay(std::span<const double>(out.series).subspan(1), fopts);
  return out;
}

}  // namespace ruelle
