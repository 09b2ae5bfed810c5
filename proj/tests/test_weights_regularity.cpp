#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ruelle/error.hpp"
#include "ruelle/harness/corpus.hpp"
#include "ruelle/mesh.hpp"
#include "ruelle/regularity.hpp"
#include "ruelle/scalar_field.hpp"

using namespace ruelle;
using std::numbers::pi;

namespace {

// Chordal distance between e^{ia} and e^{ib}.
double arc_chord(double a, double b) { return std::abs(std::sin(0.5 * (a - b))); }

double log_cusp(double t) {
  t = std::remainder(t, 2.0 * pi);
  return t == 0.0 ? 0.0 : 1.0 / (1.0 + std::abs(std::log(std::abs(t))));
}

}  // namespace

TEST(Mesh, CircleNodesAndQuadrature) {
  const auto m = Mesh::circle(64);
  EXPECT_EQ(m->size(), 128u);
  double total = 0.0;
  for (double w : m->quadrature_weights()) {
    EXPECT_GT(w, 0.0);
    total += w;
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
  EXPECT_LE(m->max_neighbor_gap(), 2.0 / 64);
}

TEST(Mesh, SphereQuadratureIntegratesArea) {
  for (int res : {16, 32}) {
    const auto m = Mesh::sphere(res);
    double total = 0.0, height = 0.0, height2 = 0.0;
    for (std::size_t i = 0; i < m->size(); ++i) {
      const double w = m->quadrature_weights()[i];
      EXPECT_GE(w, 0.0);
      total += w;
      height += w * m->node(i).height();
      height2 += w * m->node(i).height() * m->node(i).height();
    }
    EXPECT_NEAR(total, 1.0, 1e-14);
    // Normalized area measure: Z is uniform on [-1, 1].
    EXPECT_NEAR(height, 0.0, 1e-10);
    EXPECT_NEAR(height2, 1.0 / 3.0, 2e-3);
    EXPECT_LE(m->max_neighbor_gap(), 2.0 / res);
  }
}

TEST(Mesh, InterpolationReproducesNodesAndConverges) {
  auto smooth = [](const SpherePoint& p) { return std::exp(0.5 * p.x()) * std::cos(p.y() + p.height()); };
  double previous = 1.0;
  for (int res : {16, 32, 64}) {
    const auto m = Mesh::sphere(res);
    std::vector<double> v(m->size());
    for (std::size_t i = 0; i < m->size(); ++i) v[i] = smooth(m->node(i));
    // Nodes served by their own chart alone are reproduced.
    for (std::size_t i = 0; i < m->size(); i += 97) {
      const double own = i < m->size() / 2 ? Mesh::chart0_weight(m->node(i)) : 1.0 - Mesh::chart0_weight(m->node(i));
      if (own == 1.0) EXPECT_NEAR(m->interpolate(v, m->node(i)), v[i], 1e-12);
    }
    std::mt19937_64 gen(9);
    std::normal_distribution<double> n(0.0, 1.0);
    double err = 0.0;
    for (int k = 0; k < 2000; ++k) {
      const SpherePoint p(cplx(n(gen), n(gen)), cplx(n(gen), n(gen)));
      err = std::max(err, std::abs(m->interpolate(v, p) - smooth(p)));
    }
    EXPECT_LT(err, previous / 8.0) << res;
    previous = err;
  }
}

TEST(Mesh, SeamContinuity) {
  const auto m = Mesh::sphere(32);
  std::vector<double> v(m->size());
  for (std::size_t i = 0; i < m->size(); ++i) v[i] = std::sin(3.0 * m->node(i).x()) + m->node(i).height();
  double worst = 0.0;
  for (double r : {1.0, 1.05, 1.0 / 1.05}) {
    for (int k = 0; k < 360; ++k) {
      const cplx dir = std::polar(1.0, 2.0 * pi * k / 360.0);
      const double a = m->interpolate(v, SpherePoint::from_affine(dir * (r - 1e-10)));
      const double b = m->interpolate(v, SpherePoint::from_affine(dir * (r + 1e-10)));
      worst = std::max(worst, std::abs(a - b));
    }
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(Mesh, CircleInterpolationPeriodic) {
  const auto m = Mesh::circle(256);
  std::vector<double> v(m->size());
  for (std::size_t i = 0; i < m->size(); ++i) v[i] = std::cos(3.0 * m->node(i).angle());
  for (double t : {-pi + 1e-9, -1e-12, 0.0, 1e-12, pi - 1e-9, 2.5}) {
    EXPECT_NEAR(m->interpolate(v, SpherePoint::on_circle(t)), std::cos(3.0 * t), 1e-6);
  }
}

TEST(ScalarField, ClosedFormRegistry) {
  const auto p = SpherePoint::on_circle(0.4);
  EXPECT_EQ(make_field("zero")(p), 0.0);
  EXPECT_EQ(make_field("constant", {{"value", 2.5}})(p), 2.5);
  EXPECT_NEAR(make_field("cos_re", {{"amplitude", 0.3}})(p), 0.3 * std::cos(0.4), 1e-15);
  EXPECT_NEAR(make_field("cos_mode", {{"m", 4}})(p), std::cos(1.6), 1e-15);
  EXPECT_NEAR(make_field("sin_mode", {{"m", 2}})(p), std::sin(0.8), 1e-15);
  EXPECT_NEAR(make_field("abs_sin")(p), std::sin(0.4), 1e-15);
  EXPECT_NEAR(make_field("pos_cos")(SpherePoint::on_circle(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(make_field("chord_to_one")(p), arc_chord(0.4, 0.0), 1e-15);
  EXPECT_NEAR(make_field("log_cusp")(p), log_cusp(0.4), 1e-15);
  EXPECT_NEAR(make_field("height")(SpherePoint::from_affine(2.0)), 0.8, 1e-15);
  double tail = 0.0;
  for (int j = 0; j < 48; ++j) tail += std::ldexp(std::cos(std::ldexp(0.4, j)), -j);
  EXPECT_NEAR(make_field("dyadic_tail")(p), tail, 1e-12);
  EXPECT_THROW(make_field("no_such_field"), InputError);
  EXPECT_EQ(registered_fields().size(), 11u);
}

TEST(ScalarField, AlgebraAndComposition) {
  const auto f = harness::builtin_map("z2");
  const auto c = make_field("cos_re");
  const auto g = 2.0 * c - compose(c, f) + ScalarField::constant(1.0);
  const auto p = SpherePoint::on_circle(1.1);
  EXPECT_NEAR(g(p), 2.0 * std::cos(1.1) - std::cos(2.2) + 1.0, 1e-14);
  EXPECT_NEAR((c * c)(p), std::cos(1.1) * std::cos(1.1), 1e-15);
  EXPECT_TRUE((ScalarField::constant(1.0) + ScalarField::constant(2.0)).constant_value().has_value());
  const auto z = ScalarField::complex("z", [](const SpherePoint& x) { return x.affine(); });
  EXPECT_TRUE((z + c).is_complex());
  EXPECT_NEAR(std::abs((z * c).complex_at(p) - std::polar(1.0, 1.1) * std::cos(1.1)), 0.0, 1e-15);
}

TEST(ScalarField, SampledFieldsInterpolate) {
  const auto mesh = Mesh::circle(128);
  const auto c = make_field("cos_re");
  const auto s = ScalarField::sampled(mesh, c.sample_real(*mesh), "cos_sampled");
  EXPECT_EQ(s.kind(), ScalarField::Kind::mesh_sampled);
  EXPECT_EQ(s(mesh->node(5)), c(mesh->node(5)));
  EXPECT_NEAR(s(SpherePoint::on_circle(0.123)), std::cos(0.123), 1e-7);
  EXPECT_THROW(ScalarField::sampled(mesh, std::vector<double>(3, 0.0)), InputError);
}

TEST(Oscillation, Examples) {
  const auto circle = Mesh::circle(256);
  EXPECT_EQ(oscillation(ScalarField::constant(3.0), *circle), 0.0);
  EXPECT_NEAR(oscillation(make_field("cos_re"), *circle), 2.0, 1e-15);
  for (int res : {16, 32}) {
    const auto sphere = Mesh::sphere(res);
    EXPECT_NEAR(oscillation(make_field("height"), *sphere), 1.0, 2.0 / res);
  }
}

TEST(Modulus, Examples) {
  const auto circle = Mesh::circle(1024);
  EXPECT_EQ(modulus_of_continuity(ScalarField::constant(1.0), *circle, 0.3), 0.0);
  // Dense 1-D oracle: sup |cos a - cos b| over chordal distance <= r.
  const double r = 0.1, delta = 2.0 * std::asin(r);
  double oracle = 0.0;
  for (int k = 0; k < 200000; ++k) {
    const double a = 2.0 * pi * k / 200000;
    oracle = std::max(oracle, std::abs(std::cos(a) - std::cos(a + delta)));
  }
  EXPECT_NEAR(modulus_of_continuity(make_field("cos_re"), *circle, r), oracle, 0.05 * oracle);
  EXPECT_THROW(modulus_of_continuity(make_field("cos_re"), *circle, 0.0), PreconditionViolation);
}

TEST(Modulus, LipschitzBound) {
  // chord_to_one is 1-Lipschitz for the chordal metric.
  const auto sphere = Mesh::sphere(24);
  const auto g = make_field("chord_to_one");
  for (double r : {0.02, 0.05, 0.1, 0.3}) {
    EXPECT_LE(modulus_of_continuity(g, *sphere, r), r + 1e-12) << r;
  }
}

TEST(Modulus, MonotoneSubadditiveAndReachesOscillation) {
  std::mt19937_64 gen(10);
  std::normal_distribution<double> n(0.0, 1.0);
  const auto sphere = Mesh::sphere(16);
  for (int trial = 0; trial < 3; ++trial) {
    const double a = n(gen), b = n(gen), c = n(gen);
    const auto g = ScalarField::real("random", [=](const SpherePoint& p) {
      return std::sin(a * p.x() + b * p.y()) + c * p.height() * p.height();
    });
    const auto table = modulus_table(g, *sphere, {0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 1.0});
    const double slack = 1e-12;
    for (std::size_t i = 1; i < table.size(); ++i) EXPECT_GE(table[i].second + slack, table[i - 1].second);
    auto m = [&](double r) {
      for (auto& [rr, v] : table) {
        if (std::abs(rr - r) < 1e-12) return v;
      }
      return std::nan("");
    };
    const double disc = modulus_of_continuity(g, *sphere, 2.0 * sphere->max_neighbor_gap());
    EXPECT_LE(m(0.2), m(0.1) + m(0.1) + disc);
    EXPECT_LE(m(0.3), m(0.1) + m(0.2) + disc);
    EXPECT_LE(m(0.4), m(0.2) + m(0.2) + disc);
    EXPECT_NEAR(table.back().second, oscillation(g, *sphere), 1e-15);
  }
}

TEST(LogpSeminorm, ConstantAndHolder) {
  const auto circle = Mesh::circle(512);
  EXPECT_EQ(logp_seminorm(ScalarField::constant(2.0), *circle, 1.0), 0.0);
  const auto holder = ScalarField::real("sqrt_abs_sin", [](const SpherePoint& p) {
    return std::sqrt(std::abs(std::sin(p.angle())));
  });
  for (double p : {1.0, 2.0, 3.0}) {
    const double v = logp_seminorm(holder, *circle, p);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
  }
  EXPECT_THROW(logp_seminorm(holder, *circle, 0.0), PreconditionViolation);
}

TEST(LogpSeminorm, LogCuspAgainstDenseScan) {
  // Oracle: exhaustive scan over a finer, differently placed grid plus the cusp point.
  std::vector<double> t{0.0};
  const int m = 6001;
  for (int k = 0; k < m; ++k) t.push_back(-pi + 2.0 * pi * (k + 0.37) / m);
  double oracle = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      const double d = arc_chord(t[i], t[j]);
      if (d <= 0.0) continue;
      oracle = std::max(oracle, std::abs(log_cusp(t[i]) - log_cusp(t[j])) * (1.0 + std::abs(std::log(d))));
    }
  }
  const double v = logp_seminorm(make_field("log_cusp"), *Mesh::circle(1024), 1.0);
  EXPECT_GE(v, 0.9 * oracle);
  EXPECT_LE(v, 1.1 * oracle);
}

TEST(LogpSeminorm, ScalesLinearly) {
  const auto sphere = Mesh::sphere(12);
  const auto g = make_field("chord_to_one");
  const double base = logp_seminorm(g, *sphere, 2.5);
  for (double c : {-3.0, 0.5, 7.0}) {
    EXPECT_NEAR(logp_seminorm(c * g, *sphere, 2.5), std::abs(c) * base, 1e-12 * std::abs(c) * base);
  }
}

TEST(Admissibility, Examples) {
  const auto f = harness::builtin_map("z2");
  const auto circle = Mesh::circle(256);
  auto rep = admissibility_check(ScalarField(), f, *circle, 3.0);
  EXPECT_TRUE(rep.admissible);
  EXPECT_NEAR(rep.oscillation_margin, std::log(2.0), 1e-15);

  for (double c : {0.1, 0.3, 0.34, 0.35, 0.4}) {
    rep = admissibility_check(make_field("cos_re", {{"amplitude", c}}), f, *circle, 3.0);
    EXPECT_EQ(rep.admissible, 2.0 * c < std::log(2.0)) << c;
  }
  rep = admissibility_check(make_field("cos_re", {{"amplitude", 0.4}}), f, *circle, 3.0);
  EXPECT_NEAR(rep.oscillation, 0.8, 1e-15);
  EXPECT_FALSE(rep.admissible);
  for (std::size_t i = 1; i < rep.modulus.size(); ++i) EXPECT_GE(rep.modulus[i].second, rep.modulus[i - 1].second);
  EXPECT_NEAR(rep.modulus.back().second, rep.oscillation, 1e-15);
}

TEST(MollifySplit, ConstantIsUntouched) {
  const auto g = ScalarField::constant(1.7);
  for (double eps : {1.0, 0.3, 0.01}) {
    const auto split = mollify_split(g, 1.0, 1.0, eps, Mesh::circle(64));
    EXPECT_EQ(split.g1(SpherePoint::on_circle(0.3)), 1.7);
    EXPECT_EQ(split.g2(SpherePoint::on_circle(0.3)), 0.0);
  }
}

TEST(MollifySplit, ReconstructionAtNodes) {
  for (const auto& mesh : {Mesh::circle(128), Mesh::sphere(12)}) {
    const auto g = make_field("chord_to_one");
    const auto split = mollify_split(g, 1.0, 1.0, 0.1, mesh);
    for (std::size_t i = 0; i < mesh->size(); ++i) {
      const double v = g(mesh->node(i));
      EXPECT_NEAR(split.g1.real_samples()[i] + split.g2.real_samples()[i], v, 1e-16 + 2e-16 * std::abs(v));
    }
  }
}

TEST(MollifySplit, RemainderBoundIsUniformInEps) {
  // Lipschitz (gamma = 1) and Holder-1/2 examples on the circle, Lipschitz on the sphere.
  struct Case {
    ScalarField g;
    double gamma;
    std::shared_ptr<const Mesh> mesh;
  };
  const auto sqrt_sin = ScalarField::real("sqrt_abs_sin", [](const SpherePoint& p) {
    return std::sqrt(std::abs(std::sin(p.angle())));
  });
  const std::vector<Case> cases{{make_field("cos_re"), 1.0, Mesh::circle(512)},
                                {make_field("abs_sin"), 1.0, Mesh::circle(512)},
                                {sqrt_sin, 0.5, Mesh::circle(2048)},
                                {make_field("chord_to_one"), 1.0, Mesh::sphere(16)}};
  for (const auto& c : cases) {
    std::vector<double> constants;
    for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
      const auto split = mollify_split(c.g, c.gamma, 1.0, eps, c.mesh);
      constants.push_back(split.bounds.g2_constant);
      EXPECT_NEAR(split.bounds.nu, std::pow(eps, 1.0 / c.gamma), 1e-15);
    }
    const double hi = *std::max_element(constants.begin(), constants.end());
    EXPECT_LE(hi, 2.0 * constants.front() + 1e-12) << c.g.label();
    EXPECT_LE(hi, 5.0) << c.g.label();
  }
}

TEST(MollifySplit, SmoothPartGrowsAtPredictedRate) {
  const auto g = make_field("abs_sin");
  const auto mesh = Mesh::circle(1024);
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto split = mollify_split(g, 1.0, 1.0, eps, mesh);
    EXPECT_LE(split.bounds.g1_constant, 2.0) << eps;
  }
  const auto wide = mollify_split(g, 1.0, 1.0, 1.0, mesh);
  EXPECT_LE(wide.bounds.sup_g2, 1.0);
  EXPECT_LT(wide.bounds.c1_norm_g1, 2.0);
}

TEST(MollifySplit, Preconditions) {
  const auto g = make_field("cos_re");
  EXPECT_THROW(mollify_split(g, 0.0, 1.0, 0.1, Mesh::circle(32)), PreconditionViolation);
  EXPECT_THROW(mollify_split(g, 1.0, 0.5, 0.1, Mesh::circle(32)), PreconditionViolation);
  EXPECT_THROW(mollify_split(g, 1.0, 1.0, 1.5, Mesh::circle(32)), PreconditionViolation);
}

TEST(WeightCorpus, RoundTrip) {
  const auto mesh = Mesh::circle(32);
  const auto g = ScalarField::sampled(mesh, make_field("abs_sin").sample_real(*mesh));
  const auto path = testing::TempDir() + "weight.yaml";
  harness::save_sampled_weight(path, "abs_sin_sampled", g);
  const auto loaded = harness::load_weight_corpus(path);
  ASSERT_EQ(loaded.count("abs_sin_sampled"), 1u);
  const auto& h = loaded.at("abs_sin_sampled");
  for (std::size_t i = 0; i < mesh->size(); ++i) EXPECT_EQ(h.real_samples()[i], g.real_samples()[i]);
}
