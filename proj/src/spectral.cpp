#include "ruelle/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>

#include "ruelle/error.hpp"
#include "ruelle/io.hpp"
#include "ruelle/parallel.hpp"

namespace ruelle {

CenteredField center_equilibrium(const TransferContext& ctx, const ScalarField& g) {
  if (auto c = g.constant_value()) return {ScalarField::constant(0.0, g.label()), *c};
  const double mean = equilibrium_expectation(ctx, g);
  if (mean == 0.0) return {g, 0.0};
  return {shifted(g, -mean).with_label(g.label()), mean};
}

void require_centered(const TransferContext& ctx, const ScalarField& g, const std::string& who, double tolerance) {
  if (auto c = g.constant_value(); c && *c == 0.0) return;
  double sup = 0.0;
  for (double v : g.sample_real(ctx.mesh())) sup = std::max(sup, std::abs(v));
  const double mean = equilibrium_expectation(ctx, g);
  if (std::abs(mean) > tolerance * std::max(sup, 1e-300)) {
    throw PreconditionViolation(who + ": observable is not centered (<mu, g> = " + std::to_string(mean) + ")");
  }
}

ScalarField center_conformal(const TransferContext& ctx, const ScalarField& g) {
  const double mean = conformal_expectation(ctx, g).value;
  return mean == 0.0 ? g : shifted(g, -mean).with_label(g.label());
}

PerturbedFamily::PerturbedFamily(const TransferContext& ctx, const ScalarField& observable) : ctx_(&ctx) {
  if (!ctx.calibrated()) throw PreconditionViolation("PerturbedFamily: context not calibrated");
  if (observable.is_complex()) throw PreconditionViolation("PerturbedFamily: observable must be real");
  auto c = center_equilibrium(ctx, observable);
  g_ = std::move(c.field);
  mean_ = c.mean;
  for (double v : g_.sample_real(ctx.mesh())) sup_ = std::max(sup_, std::abs(v));
}

double PerturbedFamily::perturbative_radius() const {
  return sup_ > 0.0 ? 0.25 / sup_ : std::numeric_limits<double>::infinity();
}

cplx apply_L_theta(const PerturbedFamily& fam, cplx theta, const ScalarField& h, const SpherePoint& y) {
  const TransferContext& ctx = fam.context();
  cplx s = 0.0;
  for (const auto& r : ctx.map().preimages(y, ctx.options().tree.roots)) {
    const cplx expo = ctx.weight()(r.point) + theta * fam.observable()(r.point);
    s += static_cast<double>(r.multiplicity) * std::exp(expo) * h.complex_at(r.point);
  }
  return s;
}

namespace {

cplx nested_power(const PerturbedFamily& fam, cplx theta, const ScalarField& h, const SpherePoint& y, int k) {
  if (k == 0) return h.complex_at(y);
  const TransferContext& ctx = fam.context();
  cplx s = 0.0;
  for (const auto& r : ctx.map().preimages(y, ctx.options().tree.roots)) {
    const cplx expo = ctx.weight()(r.point) + theta * fam.observable()(r.point);
    s += static_cast<double>(r.multiplicity) * std::exp(expo) * nested_power(fam, theta, h, r.point, k - 1);
  }
  return s;
}

}  // namespace

double perturbed_identity_check(const PerturbedFamily& fam, cplx theta, const ScalarField& h, const SpherePoint& y,
                                int n) {
  if (n < 0) throw PreconditionViolation("perturbed_identity_check: negative n");
  const TransferContext& ctx = fam.context();
  check_leaf_budget(ctx.map().degree(), n, ctx.options().tree.leaf_budget);
  const cplx lhs = nested_power(fam, theta, h, y, n);
  const cplx rhs = twisted_series(ctx, fam.observable(), theta, h, y, n).back();
  return std::abs(lhs - rhs);
}

EigenReport leading_eigenvalue(const PerturbedFamily& fam, cplx theta, std::shared_ptr<const Mesh> mesh,
                               const std::vector<cplx>& start) {
  const TransferContext& ctx = fam.context();
  if (!mesh) mesh = ctx.mesh_ptr();
  const Collocation op(ctx.map(), ctx.weight(), mesh, theta, fam.observable(), ctx.options().tree.roots);
  EigenPair pair = power_iteration(op, ctx.lambda(), ctx.options().power, start);
  EigenReport out;
  out.theta = theta;
  out.alpha = pair.value;
  out.residual = pair.residual;
  out.iterations = pair.iterations;
  out.eigenfunction = ScalarField::sampled(mesh, std::move(pair.vector), "eigenfunction");
  return out;
}

namespace {

std::vector<cplx> samples_of(const EigenReport& r) {
  const auto s = r.eigenfunction.complex_samples();
  return {s.begin(), s.end()};
}

double log_alpha(const EigenReport& r) {
  if (!(r.alpha.real() > 0.0)) throw NumericalError("log_alpha: leading eigenvalue is not positive");
  return std::log(r.alpha.real());
}

// Richardson table for a quantity with error a h^2 + b h^4 + ...
double richardson(const std::vector<double>& h, std::vector<double> d, double* error) {
  int order = 2;
  double best_lower = d.back();
  while (d.size() > 1) {
    std::vector<double> next;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
      const double r = std::pow(h[i] / h[i + 1], order);
      next.push_back((r * d[i + 1] - d[i]) / (r - 1.0));
    }
    best_lower = d.back();
    d = std::move(next);
    order += 2;
  }
  if (error) *error = std::abs(d.back() - best_lower);
  return d.back();
}

}  // namespace

AlphaDerivatives alpha_derivatives(const PerturbedFamily& fam, std::vector<double> h_steps,
                                   std::shared_ptr<const Mesh> mesh) {
  AlphaDerivatives out;
  if (fam.sup_norm() == 0.0) return out;
  if (h_steps.empty()) {
    const double r = fam.perturbative_radius();
    h_steps = {0.08 * r, 0.04 * r, 0.02 * r};
  }
  for (std::size_t i = 0; i + 1 < h_steps.size(); ++i) {
    if (!(h_steps[i + 1] < h_steps[i]) || h_steps[i + 1] <= 0.0) {
      throw PreconditionViolation("alpha_derivatives: steps must be positive and decreasing");
    }
  }
  const EigenReport center = leading_eigenvalue(fam, 0.0, mesh);
  const double l0 = log_alpha(center);
  const auto v0 = samples_of(center);
  std::vector<double> d1, d2;
  for (double h : h_steps) {
    const double lp = log_alpha(leading_eigenvalue(fam, h, mesh, v0));
    const double lm = log_alpha(leading_eigenvalue(fam, -h, mesh, v0));
    d1.push_back((lp - lm) / (2.0 * h));
    d2.push_back((lp - 2.0 * l0 + lm) / (h * h));
  }
  double e1 = 0.0, e2 = 0.0;
  out.alpha1 = richardson(h_steps, d1, &e1);
  out.alpha2 = richardson(h_steps, d2, &e2);
  out.richardson_error = std::max(e1, e2);
  return out;
}

namespace {

// Cubic Lagrange interpolation through the four grid points around t.
double local_cubic(const std::vector<double>& x, const std::vector<double>& y, double t) {
  const std::size_t n = x.size();
  if (n < 4) {
    // Linear fallback on tiny grids.
    std::size_t i = std::upper_bound(x.begin(), x.end(), t) - x.begin();
    i = std::clamp<std::size_t>(i, 1, n - 1);
    const double u = (t - x[i - 1]) / (x[i] - x[i - 1]);
    return (1.0 - u) * y[i - 1] + u * y[i];
  }
  std::size_t i = std::upper_bound(x.begin(), x.end(), t) - x.begin();
  std::size_t lo = i >= 2 ? i - 2 : 0;
  lo = std::min(lo, n - 4);
  double s = 0.0;
  for (std::size_t a = lo; a < lo + 4; ++a) {
    double l = 1.0;
    for (std::size_t b = lo; b < lo + 4; ++b) {
      if (b != a) l *= (t - x[b]) / (x[a] - x[b]);
    }
    s += l * y[a];
  }
  return s;
}

}  // namespace

double legendre_transform(const std::vector<double>& x, const std::vector<double>& y, double s,
                          const std::function<double(double)>& refine) {
  if (x.size() != y.size() || x.empty()) throw PreconditionViolation("legendre_transform: bad grid");
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (s * x[i] - y[i] > s * x[best] - y[best]) best = i;
  }
  double value = s * x[best] - y[best];
  if (x.size() < 3) return value;
  double a = x[best == 0 ? 0 : best - 1];
  double b = x[std::min(best + 1, x.size() - 1)];
  auto objective = [&](double t) { return s * t - (refine ? refine(t) : local_cubic(x, y, t)); };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = objective(c), fd = objective(d);
  const double tol = (refine ? 1e-7 : 1e-13) * std::max(1.0, std::abs(x.back() - x.front()));
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  return std::max(value, objective(0.5 * (a + b)));
}

double RateFunction::legendre(double eps) const { return legendre_transform(theta, lambda, eps, evaluate); }

double RateFunction::lambda_at(double t) const { return local_cubic(theta, lambda, t); }

void RateFunction::write_csv(const std::string& lambda_path, const std::string& legendre_path) const {
  std::ofstream a(lambda_path);
  if (!a) throw InputError("RateFunction::write_csv: cannot open " + lambda_path);
  a << "theta,Lambda\n";
  for (std::size_t i = 0; i < theta.size(); ++i) a << format_double(theta[i]) << ',' << format_double(lambda[i]) << '\n';
  std::ofstream b(legendre_path);
  if (!b) throw InputError("RateFunction::write_csv: cannot open " + legendre_path);
  b << "epsilon,c\n";
  for (std::size_t i = 0; i < epsilon.size(); ++i) b << format_double(epsilon[i]) << ',' << format_double(c[i]) << '\n';
}

RateFunction rate_function(const PerturbedFamily& fam, double theta0, int grid_size, std::shared_ptr<const Mesh> mesh) {
  if (!(theta0 > 0.0)) throw PreconditionViolation("rate_function: theta0 must be positive");
  if (grid_size < 3 || grid_size % 2 == 0) throw PreconditionViolation("rate_function: grid_size must be odd and >= 3");
  RateFunction out;
  const int mid = grid_size / 2;
  out.theta.resize(grid_size);
  out.lambda.assign(grid_size, 0.0);
  for (int i = 0; i < grid_size; ++i) out.theta[i] = theta0 * (i - mid) / mid;
  out.theta[mid] = 0.0;

  const EigenReport center = leading_eigenvalue(fam, 0.0, mesh);
  out.alpha0 = center.alpha.real();
  const double l0 = log_alpha(center);
  for (int dir : {1, -1}) {
    auto v = samples_of(center);
    for (int k = 1; k <= mid; ++k) {
      const int i = mid + dir * k;
      const EigenReport r = leading_eigenvalue(fam, out.theta[i], mesh, v);
      out.lambda[i] = log_alpha(r) - l0;
      v = samples_of(r);
    }
  }
  for (int i = 1; i + 1 < grid_size; ++i) {
    const double second = out.lambda[i - 1] - 2.0 * out.lambda[i] + out.lambda[i + 1];
    if (second < -1e-8) {
      throw NonConvexLambda("rate_function: second difference " + std::to_string(second) + " at theta = " +
                            std::to_string(out.theta[i]));
    }
  }
  // Refinement between grid points uses fresh eigen-solves.
  out.evaluate = [fam, mesh, l0](double t) { return log_alpha(leading_eigenvalue(fam, t, mesh)) - l0; };
  const double eps_max = out.lambda.back() / theta0;
  for (int k = 0; k < grid_size; ++k) {
    const double eps = eps_max * k / grid_size;
    out.epsilon.push_back(eps);
    out.c.push_back(out.legendre(eps));
  }
  return out;
}

GapReport spectral_gap_rate(const TransferContext& ctx, const std::vector<ScalarField>& g_family, int n_max,
                            double centering_tolerance) {
  if (n_max < 6) throw PreconditionViolation("spectral_gap_rate: n_max must be at least 6");
  const Mesh& mesh = ctx.mesh();
  double rho_sup = 0.0;
  for (double v : ctx.rho().sample_real(mesh)) rho_sup = std::max(rho_sup, std::abs(v));
  GapReport report;
  for (const auto& g : g_family) {
    double g_sup = 0.0;
    for (double v : g.sample_real(mesh)) g_sup = std::max(g_sup, std::abs(v));
    const Expectation e = conformal_expectation(ctx, g);
    if (std::abs(e.value) > centering_tolerance * std::max(g_sup, 1e-300)) {
      throw PreconditionViolation("spectral_gap_rate: observable '" + g.label() + "' is not m-centered (<m, g> = " +
                                  std::to_string(e.value) + ")");
    }
    const auto per_node = parallel_map<std::vector<double>>(
        mesh.size(), [&](std::size_t j) { return apply_Ln_series(ctx, g, mesh.node(j), n_max); });
    GapFit gf;
    gf.label = g.label();
    gf.mean = e.value;
    gf.series.assign(n_max + 1, 0.0);
    for (int k = 0; k <= n_max; ++k) {
      const double scale = std::pow(ctx.lambda(), k);
      for (const auto& s : per_node) gf.series[k] = std::max(gf.series[k], std::abs(s[k]) / scale);
    }
    DecayFitOptions fopts;
    fopts.floor = std::max(1e-13 * gf.series[0], (std::abs(e.value) + e.change) * rho_sup);
    gf.fit = fit_decay(std::span<const double>(gf.series).subspan(1), fopts);
    report.max_beta = std::max(report.max_beta, gf.fit.rate);
    report.min_r_squared = std::min(report.min_r_squared, gf.fit.r_squared);
    report.observables.push_back(std::move(gf));
  }
  return report;
}

const char* to_string(CocycleVerdict v) {
  switch (v) {
    case CocycleVerdict::contracting: return "contracting";
    case CocycleVerdict::non_contracting: return "non-contracting";
    case CocycleVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::vector<CocycleResult> cocycle_test(const PerturbedFamily& fam, const std::vector<double>& t_values, int n_max,
                                        const CocycleOptions& opts) {
  if (n_max < 8) throw PreconditionViolation("cocycle_test: n_max must be at least 8");
  const TransferContext& ctx = fam.context();
  const auto mesh = ctx.mesh_ptr();
  const std::size_t size = mesh->size();
  std::vector<std::vector<cplx>> probes;
  probes.emplace_back(size, cplx(1.0));
  {
    const auto r = ctx.rho().sample_complex(*mesh);
    probes.emplace_back(r.begin(), r.end());
    std::vector<cplx> x(size), y(size);
    for (std::size_t j = 0; j < size; ++j) {
      x[j] = mesh->node(j).x();
      y[j] = mesh->node(j).y();
    }
    probes.push_back(std::move(x));
    probes.push_back(std::move(y));
  }
  std::vector<CocycleResult> out;
  for (double t : t_values) {
    if (t == 0.0) throw PreconditionViolation("cocycle_test: t must be nonzero");
    const Collocation op(ctx.map(), ctx.weight(), mesh, cplx(0.0, t), fam.observable(), ctx.options().tree.roots);
    CocycleResult res;
    res.t = t;
    res.series.assign(n_max + 1, 0.0);
    for (auto v : probes) {
      std::vector<cplx> u(size);
      for (int k = 0; k <= n_max; ++k) {
        double sup = 0.0;
        for (const auto& z : v) sup = std::max(sup, std::abs(z));
        res.series[k] = std::max(res.series[k], sup);
        if (k == n_max) break;
        op.apply(v, u);
        for (std::size_t j = 0; j < size; ++j) v[j] = u[j] / ctx.lambda();
      }
    }
    const double floor = 1e-13 * res.series[0];
    std::vector<double> xs, ys;
    for (int k = 1; k <= n_max; ++k) {
      if (!(res.series[k] > floor)) break;
      xs.push_back(k);
      ys.push_back(std::log(res.series[k]));
    }
    if (xs.size() < 5) {
      // Collapsed to the floor within a few steps.
      res.rate = xs.size() >= 2 ? std::exp(fit_line(xs, ys).slope) : 0.0;
      res.r_squared = 1.0;
      res.verdict = CocycleVerdict::contracting;
    } else {
      const LineFit line = fit_line(xs, ys);
      res.rate = std::exp(line.slope);
      res.r_squared = line.r_squared;
      if (res.rate >= 1.0 - opts.margin) {
        res.verdict = CocycleVerdict::non_contracting;
      } else if (res.r_squared >= opts.min_r_squared) {
        res.verdict = CocycleVerdict::contracting;
      } else {
        res.verdict = CocycleVerdict::inconclusive;
      }
    }
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace ruelle
