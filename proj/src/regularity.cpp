#include "ruelle/regularity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "ruelle/error.hpp"
#include "ruelle/parallel.hpp"

namespace ruelle {

namespace {

std::vector<double> node_values(const ScalarField& g, const Mesh& mesh) {
  if (g.is_complex()) throw PreconditionViolation("regularity estimators need a real field");
  return g.sample_real(mesh);
}

// Max of visit(i, j, dist) over node pairs i < j with fs_distance <= r.
template <class Visit>
double max_over_close_pairs(const Mesh& mesh, double r, Visit visit) {
  const std::size_t n = mesh.size();
  std::vector<std::array<double, 3>> pos(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = mesh.node(i);
    pos[i] = {p.x(), p.y(), p.height()};
  }
  std::vector<double> best(n, 0.0);
  if (r >= 0.5) {
    // Most pairs qualify; scan them all.
    parallel_for(n, [&](std::size_t i) {
      double m = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = fs_distance(mesh.node(i), mesh.node(j));
        // Every pair is within the diameter, including rounding just above 1.
        if (d <= r || r >= 1.0) m = std::max(m, visit(i, j, d));
      }
      best[i] = m;
    });
  } else {
    // Unit-sphere embedding: chordal distance is half the Euclidean one.
    const double cell = 2.0 * r;
    auto key_of = [&](int a, int b, int c) {
      return (static_cast<std::int64_t>(a) * 73856093) ^ (static_cast<std::int64_t>(b) * 19349663) ^
             (static_cast<std::int64_t>(c) * 83492791);
    };
    std::vector<std::array<int, 3>> cells(n);
    std::unordered_map<std::int64_t, std::vector<std::uint32_t>> buckets;
    for (std::size_t i = 0; i < n; ++i) {
      for (int k = 0; k < 3; ++k) cells[i][k] = static_cast<int>(std::floor(pos[i][k] / cell));
      buckets[key_of(cells[i][0], cells[i][1], cells[i][2])].push_back(static_cast<std::uint32_t>(i));
    }
    parallel_for(n, [&](std::size_t i) {
      double m = 0.0;
      for (int a = -1; a <= 1; ++a) {
        for (int b = -1; b <= 1; ++b) {
          for (int c = -1; c <= 1; ++c) {
            auto it = buckets.find(key_of(cells[i][0] + a, cells[i][1] + b, cells[i][2] + c));
            if (it == buckets.end()) continue;
            for (std::uint32_t j : it->second) {
              if (j <= i) continue;
              const double d = fs_distance(mesh.node(i), mesh.node(j));
              if (d <= r) m = std::max(m, visit(i, static_cast<std::size_t>(j), d));
            }
          }
        }
      }
      best[i] = m;
    });
  }
  return n == 0 ? 0.0 : *std::max_element(best.begin(), best.end());
}

// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    j(k, k - 1) = b;
    j(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  std::vector<double> x(n), w(n);
  for (int k = 0; k < n; ++k) {
    x[k] = es.eigenvalues()(k);
    w[k] = 2.0 * es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
  }
  return {x, w};
}

double bump(double t) {
  const double u = 1.0 - t * t;
  return u > 0.0 ? u * u * u * u : 0.0;
}

struct Rule {
  std::vector<cplx> offsets;  // in units of nu
  std::vector<double> weights;
};

// Discrete bump measure, normalized to total mass 1.
Rule circle_rule() {
  auto [x, w] = gauss_legendre(24);
  Rule rule;
  double total = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    rule.offsets.emplace_back(x[k], 0.0);
    rule.weights.push_back(w[k] * bump(x[k]));
    total += rule.weights.back();
  }
  for (auto& v : rule.weights) v /= total;
  return rule;
}

Rule disc_rule() {
  auto [x, w] = gauss_legendre(12);
  constexpr int kAngles = 24;
  Rule rule;
  double total = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double rad = 0.5 * (x[k] + 1.0);
    for (int a = 0; a < kAngles; ++a) {
      const double t = 2.0 * std::numbers::pi * (a + 0.5 * (k % 2)) / kAngles;
      rule.offsets.push_back(std::polar(rad, t));
      rule.weights.push_back(0.5 * w[k] * rad * bump(rad));
      total += rule.weights.back();
    }
  }
  for (auto& v : rule.weights) v /= total;
  return rule;
}

double convolve(const ScalarField& g, const SpherePoint& x, double nu, const Rule& rule, bool circle) {
  double acc = 0.0;
  if (circle) {
    const double t = x.angle();
    for (std::size_t k = 0; k < rule.offsets.size(); ++k) {
      acc += rule.weights[k] * g(SpherePoint::on_circle(t + nu * rule.offsets[k].real()));
    }
    return acc;
  }
  const double c0 = Mesh::chart0_weight(x);
  if (c0 > 0.0) {
    const cplx u = x.z0() / x.z1();
    double part = 0.0;
    for (std::size_t k = 0; k < rule.offsets.size(); ++k) {
      part += rule.weights[k] * g(SpherePoint(u + nu * rule.offsets[k], cplx(1.0)));
    }
    acc += c0 * part;
  }
  if (c0 < 1.0) {
    const cplx w = x.z1() / x.z0();
    double part = 0.0;
    for (std::size_t k = 0; k < rule.offsets.size(); ++k) {
      part += rule.weights[k] * g(SpherePoint(cplx(1.0), w + nu * rule.offsets[k]));
    }
    acc += (1.0 - c0) * part;
  }
  return acc;
}

// Finite-difference sup of the gradient of a closed-form evaluator, in the
// angle (circle) or the chart coordinate (sphere).
template <class Fn>
double gradient_sup(const Mesh& mesh, Fn fn, double h) {
  const bool circle = mesh.kind() == Mesh::Kind::circle;
  std::vector<double> grad(mesh.size(), 0.0);
  parallel_for(mesh.size(), [&](std::size_t i) {
    const auto& x = mesh.node(i);
    if (circle) {
      const double t = x.angle();
      grad[i] = std::abs(fn(SpherePoint::on_circle(t + h)) - fn(SpherePoint::on_circle(t - h))) / (2.0 * h);
      return;
    }
    const bool chart0 = std::abs(x.z0()) <= std::abs(x.z1());
    const cplx u = chart0 ? x.z0() / x.z1() : x.z1() / x.z0();
    auto at = [&](cplx v) { return chart0 ? fn(SpherePoint(v, cplx(1.0))) : fn(SpherePoint(cplx(1.0), v)); };
    const double gx = (at(u + h) - at(u - h)) / (2.0 * h);
    const double gy = (at(u + cplx(0, h)) - at(u - cplx(0, h))) / (2.0 * h);
    grad[i] = std::hypot(gx, gy);
  });
  return *std::max_element(grad.begin(), grad.end());
}

}  // namespace

double oscillation(const ScalarField& g, const Mesh& mesh) {
  const auto v = node_values(g, mesh);
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

double modulus_of_continuity(const ScalarField& g, const Mesh& mesh, double r) {
  if (!(r > 0.0)) throw PreconditionViolation("modulus_of_continuity: r must be positive");
  const auto v = node_values(g, mesh);
  return max_over_close_pairs(mesh, std::min(r, 1.0),
                              [&](std::size_t i, std::size_t j, double) { return std::abs(v[i] - v[j]); });
}

std::vector<std::pair<double, double>> modulus_table(const ScalarField& g, const Mesh& mesh,
                                                     std::vector<double> radii) {
  std::sort(radii.begin(), radii.end());
  std::vector<std::pair<double, double>> out;
  for (double r : radii) out.emplace_back(r, modulus_of_continuity(g, mesh, r));
  return out;
}

double logp_seminorm(const ScalarField& g, const Mesh& mesh, double p) {
  if (!(p > 0.0)) throw PreconditionViolation("logp_seminorm: p must be positive");
  const auto v = node_values(g, mesh);
  return max_over_close_pairs(mesh, 1.0, [&](std::size_t i, std::size_t j, double d) {
    if (d <= 0.0) return 0.0;
    return std::abs(v[i] - v[j]) * std::pow(1.0 + std::abs(std::log(d)), p);
  });
}

RegularityReport admissibility_check(const ScalarField& phi, const RationalMap& f, const Mesh& mesh, double q) {
  RegularityReport rep;
  rep.oscillation = oscillation(phi, mesh);
  rep.p = q;
  rep.logp_seminorm = logp_seminorm(phi, mesh, q);
  rep.mesh_gap = mesh.max_neighbor_gap();
  std::vector<double> radii;
  for (double r = 1.0; r >= std::max(rep.mesh_gap, 1e-3); r /= 2.0) radii.push_back(r);
  rep.modulus = modulus_table(phi, mesh, radii);
  rep.oscillation_margin = std::log(static_cast<double>(f.degree())) - rep.oscillation;
  rep.admissible = rep.oscillation_margin > 0.0 && std::isfinite(rep.logp_seminorm);
  return rep;
}

MollifySplit mollify_split(const ScalarField& g, double gamma, double s, double eps,
                           std::shared_ptr<const Mesh> probe) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw PreconditionViolation("mollify_split: gamma must be in (0, 1]");
  if (!(s >= 1.0)) throw PreconditionViolation("mollify_split: s must be >= 1");
  if (!(eps > 0.0 && eps <= 1.0)) throw PreconditionViolation("mollify_split: eps must be in (0, 1]");
  if (!probe) throw PreconditionViolation("mollify_split: probe mesh required");
  if (g.is_complex()) throw PreconditionViolation("mollify_split: real field required");

  MollifySplit out;
  auto& b = out.bounds;
  b.nu = std::pow(eps, 1.0 / gamma);
  const auto gv = g.sample_real(*probe);
  for (double v : gv) b.sup_g = std::max(b.sup_g, std::abs(v));

  if (auto c = g.constant_value()) {
    out.g1 = g;
    out.g2 = ScalarField::constant(0.0, "mollify_remainder");
    b.c1_norm_g1 = std::abs(*c);
    b.g1_constant = b.sup_g > 0.0 ? 1.0 : 0.0;
    return out;
  }

  const bool circle = probe->kind() == Mesh::Kind::circle;
  const Rule rule = circle ? circle_rule() : disc_rule();
  const double nu = b.nu;
  auto smooth = [g, nu, rule, circle](const SpherePoint& x) { return convolve(g, x, nu, rule, circle); };

  std::vector<double> v1(probe->size()), v2(probe->size());
  parallel_for(probe->size(), [&](std::size_t i) {
    v1[i] = smooth(probe->node(i));
    v2[i] = gv[i] - v1[i];
  });
  double sup_g1 = 0.0;
  for (std::size_t i = 0; i < v1.size(); ++i) {
    sup_g1 = std::max(sup_g1, std::abs(v1[i]));
    b.sup_g2 = std::max(b.sup_g2, std::abs(v2[i]));
  }
  b.c1_norm_g1 = sup_g1 + gradient_sup(*probe, smooth, std::min(1e-4, nu / 16.0));
  b.g2_constant = b.sup_g2 / eps;
  b.g1_constant = b.sup_g > 0.0 ? b.c1_norm_g1 / (b.sup_g * std::pow(1.0 / eps, s / gamma)) : 0.0;
  out.g1 = ScalarField::sampled(probe, std::move(v1), "mollified");
  out.g2 = ScalarField::sampled(probe, std::move(v2), "mollify_remainder");
  return out;
}

}  // namespace ruelle
