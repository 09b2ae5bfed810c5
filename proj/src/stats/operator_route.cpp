#include "ruelle/stats/operator_route.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "ruelle/error.hpp"
#include "ruelle/parallel.hpp"
#include "ruelle/rng.hpp"

namespace ruelle::stats {

namespace {

double sup_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double weighted_sum(const std::vector<double>& q, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) s += q[j] * a[j] * b[j];
  return s;
}

}  // namespace

GreenKubo green_kubo_variance(const TransferContext& ctx, const ScalarField& g, int n_cut) {
  if (n_cut < 1) throw PreconditionViolation("green_kubo_variance: n_cut must be >= 1");
  require_centered(ctx, g, "green_kubo_variance");
  const auto t0 = std::chrono::steady_clock::now();
  GreenKubo out;
  const auto& q = ctx.equilibrium_weights();
  const auto series = normalized_series(ctx, g, n_cut);
  const auto g_nodes = g.sample_real(ctx.mesh());
  out.terms.push_back(equilibrium_expectation(ctx, g * g));
  for (int k = 1; k <= n_cut; ++k) out.terms.push_back(weighted_sum(q, series[k], g_nodes));
  out.sigma2 = out.terms[0];
  for (int k = 1; k <= n_cut; ++k) out.sigma2 += 2.0 * out.terms[k];

  std::vector<double> tail(out.terms.begin() + 1, out.terms.end());
  if (sup_abs(tail) > 0.0) {
    try {
      DecayFitOptions fopts;
      fopts.floor = 1e-14 * std::abs(out.terms[0]);
      fopts.skip_transient = 1;
      fopts.min_points = 3;
      out.beta = fit_decay(tail, fopts).rate;
    } catch (const DegenerateDecay&) {
      for (std::size_t k = 0; k + 1 < tail.size(); ++k) {
        if (tail[k] != 0.0) out.beta = std::max(out.beta, std::abs(tail[k + 1] / tail[k]));
      }
    }
    out.beta = std::min(out.beta, 0.99);
    out.tail_bound = 2.0 * std::abs(out.terms.back()) * out.beta / (1.0 - out.beta);
  }
  if (out.sigma2 < -1e-8) throw NegativeVariance("green_kubo_variance: sigma^2 = " + std::to_string(out.sigma2));

  StatReport& r = out.report;
  r.test = "green_kubo";
  r.route = "operator";
  r.lower = -1e-8;
  r.add("tail_bound", out.tail_bound);
  r.add("beta", out.beta);
  r.sample_sizes["n_cut"] = static_cast<std::size_t>(n_cut);
  r.judge(out.sigma2);
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

Correlation correlation_decay(const TransferContext& ctx, const ScalarField& g0, const ScalarField& g1, int n_max) {
  if (n_max < 1) throw PreconditionViolation("correlation_decay: n_max must be >= 1");
  Correlation out;
  const ScalarField g0c = center_equilibrium(ctx, g0).field;
  if (auto c = g0c.constant_value(); c && *c == 0.0) {
    out.series.assign(n_max + 1, 0.0);
    return out;
  }
  const auto& q = ctx.equilibrium_weights();
  const auto series = normalized_series(ctx, g0c, n_max);
  const auto g1_nodes = g1.sample_real(ctx.mesh());
  out.series.push_back(equilibrium_expectation(ctx, g0c * g1));
  for (int k = 1; k <= n_max; ++k) out.series.push_back(weighted_sum(q, series[k], g1_nodes));
  const std::span<const double> tail(out.series.data() + 1, out.series.size() - 1);
  if (sup_abs(tail) <= 1e-14 * std::abs(out.series[0])) return out;
  DecayFitOptions fopts;
  fopts.floor = 1e-12 * std::max(std::abs(out.series[0]), sup_abs(tail));
  out.fit = fit_decay(tail, fopts);
  return out;
}

GordinTail gordin_tail(const TransferContext& ctx, const ScalarField& g, int n_max) {
  if (n_max < 4) throw PreconditionViolation("gordin_tail: n_max must be >= 4");
  require_centered(ctx, g, "gordin_tail");
  GordinTail out;
  const auto& q = ctx.equilibrium_weights();
  const auto series = normalized_series(ctx, g, n_max);
  double total = 0.0;
  for (int k = 1; k <= n_max; ++k) {
    out.terms.push_back(weighted_sum(q, series[k], series[k]));
    total += out.terms.back();
    out.partial_sums.push_back(total);
  }
  out.exact_zero = std::all_of(out.terms.begin(), out.terms.end(), [](double a) { return a == 0.0; });
  if (out.exact_zero) {
    out.convergent = true;
    return out;
  }
  const double floor = 1e-12 * sup_abs(series[0]) * sup_abs(series[0]);
  for (std::size_t k = 0; k + 1 < out.terms.size(); ++k) {
    if (!(out.terms[k] > floor && out.terms[k + 1] > floor)) break;
    out.ratios.push_back(out.terms[k + 1] / out.terms[k]);
  }
  if (out.ratios.size() >= 3) {
    const auto last = std::vector<double>(out.ratios.end() - 3, out.ratios.end());
    const auto [lo, hi] = std::minmax_element(last.begin(), last.end());
    out.limiting_ratio = last.back();
    out.convergent = *hi - *lo <= 0.05 && *hi < 1.0;
  }
  return out;
}

Coboundary coboundary_solve(const TransferContext& ctx, const ScalarField& g, int n_max, double tolerance,
                            std::size_t samples) {
  if (n_max < 1) throw PreconditionViolation("coboundary_solve: n_max must be >= 1");
  require_centered(ctx, g, "coboundary_solve");
  Coboundary out;
  const auto mesh = ctx.mesh_ptr();
  const auto series = normalized_series(ctx, g, n_max);
  std::vector<double> h(mesh->size(), 0.0);
  for (int k = 1; k <= n_max; ++k) {
    out.increments.push_back(sup_abs(series[k]));
    for (std::size_t j = 0; j < h.size(); ++j) h[j] += series[k][j];
  }
  const double scale = sup_abs(series[0]);
  if (out.increments.back() > 1e-12 * scale && out.increments.back() > out.increments.front() * (1.0 + 1e-9)) {
    throw Diverged("coboundary_solve: partial sums grow");
  }
  out.converged = out.increments.back() <= tolerance;
  const double mean = equilibrium_expectation(ctx, h);
  for (auto& v : h) v -= mean;
  out.h = ScalarField::sampled(mesh, std::move(h), "transfer_function");
  const auto xs = julia_points(ctx.map(), ctx.circle_system(), samples, mix64(ctx.options().seed ^ 0x636f62ULL));
  for (const auto& x : xs) {
    out.residual = std::max(out.residual, std::abs(g(x) - (out.h(ctx.map()(x)) - out.h(x))));
  }
  out.is_coboundary = out.converged && out.residual <= tolerance;
  return out;
}

namespace {

// L_[i t_{k-1}] ... L_[i t_0] rho at z (no twist when t is empty).
cplx nested_composition(const TransferContext& ctx, const ScalarField& g, const std::vector<double>& t, int k,
                        const SpherePoint& z, bool twisted) {
  if (k == 0) return ctx.rho()(z);
  cplx s = 0.0;
  for (const auto& r : ctx.map().preimages(z, ctx.options().tree.roots)) {
    const cplx expo(ctx.weight()(r.point), twisted ? t[k - 1] * g(r.point) : 0.0);
    s += static_cast<double>(r.multiplicity) * std::exp(expo) * nested_composition(ctx, g, t, k - 1, r.point, twisted);
  }
  return s;
}

struct LeafSum {
  cplx num = 0.0;
  double den = 0.0;
  LeafSum& operator+=(const LeafSum& o) {
    num += o.num;
    den += o.den;
    return *this;
  }
};

}  // namespace

StrongCoding asip_strong_coding_check(const PerturbedFamily& fam, const std::vector<double>& t_list, int atom_depth) {
  const TransferContext& ctx = fam.context();
  const ScalarField& g = fam.observable();
  const int n = static_cast<int>(t_list.size());
  if (n < 1 || atom_depth < 0) throw PreconditionViolation("asip_strong_coding_check: empty t list");
  check_leaf_budget(ctx.map().degree(), n + atom_depth, ctx.options().tree.leaf_budget);
  const EmpiricalMeasure atoms = estimate_conformal_measure(ctx, ctx.base_points()[0], atom_depth);

  const auto lhs_parts = parallel_map<LeafSum>(atoms.size(), [&](std::size_t i) {
    return reduce_tree(ctx.map(), ctx.weight(), atoms.atoms[i].point, n, ctx.options().tree, LeafSum{},
                       [&](LeafSum& acc, const TreeNode& node) {
                         if (node.depth != n) return;
                         const double w =
                             static_cast<double>(node.multiplicity) * std::exp(node.log_weight) * ctx.rho()(node.point);
                         double phase = 0.0;
                         SpherePoint x = node.point;
                         for (int l = 0; l < n; ++l) {
                           phase += t_list[l] * g(x);
                           x = ctx.map()(x);
                         }
                         acc.num += w * std::exp(cplx(0.0, phase));
                         acc.den += w;
                       });
  });
  const auto rhs_parts = parallel_map<std::pair<cplx, cplx>>(atoms.size(), [&](std::size_t i) {
    const SpherePoint& y = atoms.atoms[i].point;
    return std::make_pair(nested_composition(ctx, g, t_list, n, y, true),
                          nested_composition(ctx, g, t_list, n, y, false));
  });
  LeafSum lhs;
  cplx rhs_num = 0.0, rhs_den = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double w = atoms.atoms[i].weight;
    lhs.num += w * lhs_parts[i].num;
    lhs.den += w * lhs_parts[i].den;
    rhs_num += w * rhs_parts[i].first;
    rhs_den += w * rhs_parts[i].second;
  }
  StrongCoding out;
  out.lhs = lhs.num / lhs.den;
  out.rhs = rhs_num / rhs_den;
  out.discrepancy = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace ruelle::stats
