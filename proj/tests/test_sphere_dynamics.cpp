#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ruelle/backward_tree.hpp"
#include "ruelle/error.hpp"
#include "ruelle/harness/corpus.hpp"
#include "ruelle/polynomial_roots.hpp"
#include "ruelle/rational_map.hpp"

using namespace ruelle;
using std::numbers::pi;

namespace {

// Chordal distance in the affine chart, written independently of SpherePoint.
double chordal(cplx z, cplx w) {
  return std::abs(z - w) / std::sqrt((1.0 + std::norm(z)) * (1.0 + std::norm(w)));
}

RationalMap z2() { return harness::builtin_map("z2"); }

SpherePoint random_point(std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  return SpherePoint(cplx(n(gen), n(gen)), cplx(n(gen), n(gen)));
}

bool contains(const RootSet& roots, cplx z, int mult, double tol = 1e-12) {
  for (const auto& r : roots) {
    if (fs_distance(r.point, SpherePoint::from_affine(z)) <= tol && r.multiplicity == mult) return true;
  }
  return false;
}

}  // namespace

TEST(SpherePoint, NormalizedAfterConstruction) {
  std::mt19937_64 gen(1);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_point(gen);
    EXPECT_NEAR(std::norm(p.z0()) + std::norm(p.z1()), 1.0, 1e-14);
  }
  const SpherePoint huge(cplx(1e200), cplx(3e200));
  EXPECT_NEAR(std::norm(huge.z0()) + std::norm(huge.z1()), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(SpherePoint(cplx(1e-200), cplx(0)).z0()), 1.0, 1e-14);
}

TEST(SpherePoint, RejectsZeroPair) {
  EXPECT_THROW(SpherePoint(cplx(0), cplx(0)), InputError);
  EXPECT_THROW(SpherePoint(cplx(NAN), cplx(1)), InputError);
}

TEST(SpherePoint, PhaseInvariantRepresentative) {
  const cplx z0(0.3, -1.2), z1(2.0, 0.5);
  const SpherePoint a(z0, z1);
  const SpherePoint b(z0 * std::polar(2.5, 1.1), z1 * std::polar(2.5, 1.1));
  EXPECT_NEAR(std::abs(a.z0() - b.z0()), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a.z1() - b.z1()), 0.0, 1e-15);
  EXPECT_TRUE(projectively_equal(a, b));
}

TEST(SpherePoint, AffineAndAngle) {
  EXPECT_TRUE(SpherePoint::infinity().is_infinity());
  EXPECT_NEAR(std::abs(SpherePoint::from_affine(cplx(2, -1)).affine() - cplx(2, -1)), 0.0, 1e-15);
  EXPECT_NEAR(SpherePoint::on_circle(0.7).angle(), 0.7, 1e-15);
  EXPECT_NEAR(SpherePoint::on_circle(0.7).x(), std::cos(0.7), 1e-15);
  EXPECT_NEAR(SpherePoint::from_affine(cplx(0)).height(), -1.0, 1e-15);
  EXPECT_NEAR(SpherePoint::infinity().height(), 1.0, 1e-15);
}

TEST(FsDistance, Examples) {
  const auto one = SpherePoint::from_affine(1.0);
  EXPECT_EQ(fs_distance(one, one), 0.0);
  EXPECT_NEAR(fs_distance(SpherePoint::from_affine(0.0), SpherePoint::infinity()), 1.0, 1e-15);
  EXPECT_NEAR(fs_distance(one, SpherePoint::from_affine(-1.0)), chordal(1.0, -1.0), 1e-15);
  EXPECT_NEAR(chordal(1.0, -1.0), 1.0, 1e-15);
}

TEST(FsDistance, MatchesAffineFormula) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const cplx z(n(gen), n(gen)), w(n(gen), n(gen));
    EXPECT_NEAR(fs_distance(SpherePoint::from_affine(z), SpherePoint::from_affine(w)), chordal(z, w), 1e-14);
  }
}

TEST(FsDistance, MetricAxiomsOnRandomTriples) {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 10000; ++i) {
    const auto a = random_point(gen), b = random_point(gen), c = random_point(gen);
    const double ab = fs_distance(a, b), bc = fs_distance(b, c), ac = fs_distance(a, c);
    ASSERT_GE(ab, 0.0);
    ASSERT_LE(ab, 1.0 + 1e-15);
    ASSERT_NEAR(ab, fs_distance(b, a), 1e-12);
    ASSERT_LE(ac, ab + bc + 1e-12);
  }
}

TEST(RationalMap, EvaluateExamples) {
  const auto f = z2();
  EXPECT_TRUE(projectively_equal(f(SpherePoint::from_affine(1.0)), SpherePoint::from_affine(1.0)));
  EXPECT_TRUE(projectively_equal(f(SpherePoint::infinity()), SpherePoint::infinity()));
  const RationalMap g({cplx(1), cplx(0), cplx(1)}, {cplx(-1), cplx(0), cplx(1)});
  EXPECT_TRUE(projectively_equal(g(SpherePoint::from_affine(0.0)), SpherePoint::from_affine(-1.0)));
}

TEST(RationalMap, EvaluateMatchesAffineFormula) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n(0.0, 1.5);
  for (const auto& f : harness::builtin_maps()) {
    for (int i = 0; i < 200; ++i) {
      const cplx z(n(gen), n(gen));
      cplx num = 0.0, den = 0.0;
      for (int k = f.degree(); k >= 0; --k) {
        num = num * z + f.p()[k];
        den = den * z + f.q()[k];
      }
      EXPECT_LE(fs_distance(f(SpherePoint::from_affine(z)), SpherePoint::from_affine(num / den)), 1e-13);
    }
  }
}

TEST(RationalMap, RejectsInvalidMaps) {
  // (z^2 - 1) / (z - 1)(z + 2) shares the root z = 1.
  EXPECT_THROW(RationalMap({cplx(-1), cplx(0), cplx(1)}, {cplx(-2), cplx(1), cplx(1)}), InvalidMap);
  // Degree 1.
  EXPECT_THROW(RationalMap({cplx(0), cplx(1)}, {cplx(1), cplx(0)}), InvalidMap);
  // Both forms vanish at infinity.
  EXPECT_THROW(RationalMap({cplx(1), cplx(1), cplx(0)}, {cplx(2), cplx(1), cplx(0)}), InvalidMap);
  EXPECT_THROW(RationalMap({cplx(1), cplx(1)}, {cplx(2), cplx(1), cplx(3)}), InvalidMap);
}

TEST(Preimages, Examples) {
  const auto f = z2();
  auto pre = f.preimages(SpherePoint::from_affine(1.0));
  ASSERT_EQ(pre.size(), 2u);
  EXPECT_TRUE(contains(pre, 1.0, 1));
  EXPECT_TRUE(contains(pre, -1.0, 1));

  pre = f.preimages(SpherePoint::from_affine(0.0));
  ASSERT_EQ(pre.size(), 1u);
  EXPECT_TRUE(contains(pre, 0.0, 2));

  pre = harness::builtin_map("z2_minus_1").preimages(SpherePoint::from_affine(-1.0));
  ASSERT_EQ(pre.size(), 1u);
  EXPECT_TRUE(contains(pre, 0.0, 2));

  pre = f.preimages(SpherePoint::infinity());
  ASSERT_EQ(pre.size(), 1u);
  EXPECT_TRUE(pre[0].point.is_infinity());
  EXPECT_EQ(pre[0].multiplicity, 2);
}

TEST(Preimages, MultiplicitiesSumToDegreeAndMapBack) {
  std::mt19937_64 gen(5);
  auto maps = harness::builtin_maps();
  // Degree 3 and 5 maps exercise the Aberth path.
  maps.emplace_back(std::vector<cplx>{cplx(0.2, 0.1), cplx(-0.5), cplx(0), cplx(1)},
                    std::vector<cplx>{cplx(1), cplx(0), cplx(0.3), cplx(0)}, "cubic");
  maps.emplace_back(std::vector<cplx>{cplx(1), cplx(0, 2), cplx(0), cplx(-1), cplx(0.5), cplx(0.1)},
                    std::vector<cplx>{cplx(0.3), cplx(1), cplx(0), cplx(0), cplx(2), cplx(0)}, "quintic");
  for (const auto& f : maps) {
    for (int i = 0; i < 500; ++i) {
      const auto y = random_point(gen);
      const auto pre = f.preimages(y);
      ASSERT_EQ(pre.total_multiplicity(), f.degree()) << f.label();
      for (const auto& r : pre) ASSERT_LE(fs_distance(f(r.point), y), 1e-9) << f.label();
    }
  }
}

TEST(Preimages, CriticalValuesOfCubicMergeDoubleRoots) {
  // f(z) = z^3 - 3z has critical points +-1 with critical values -+2.
  const auto f = RationalMap::polynomial({cplx(0), cplx(-3), cplx(0), cplx(1)});
  const auto pre = f.preimages(SpherePoint::from_affine(-2.0));
  EXPECT_EQ(pre.size(), 2u);
  EXPECT_TRUE(contains(pre, 1.0, 2, 1e-7));
  EXPECT_TRUE(contains(pre, -2.0, 1, 1e-9));
}

TEST(Preimages, PairingStability) {
  // Matching displacement shrinks with dist(y, y'), including near a critical value.
  const auto f = harness::builtin_map("rat_1_3");
  std::mt19937_64 gen(6);
  for (const SpherePoint y : {random_point(gen), f(SpherePoint::from_affine(0.0))}) {
    double previous = 1.0;
    for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
      const SpherePoint y2(y.z0() + eps * cplx(0.6, 0.8), y.z1());
      auto a = f.preimages(y), b = f.preimages(y2);
      std::vector<SpherePoint> pa, pb;
      for (const auto& r : a) for (int k = 0; k < r.multiplicity; ++k) pa.push_back(r.point);
      for (const auto& r : b) for (int k = 0; k < r.multiplicity; ++k) pb.push_back(r.point);
      ASSERT_EQ(pa.size(), 2u);
      ASSERT_EQ(pb.size(), 2u);
      const double straight = std::max(fs_distance(pa[0], pb[0]), fs_distance(pa[1], pb[1]));
      const double crossed = std::max(fs_distance(pa[0], pb[1]), fs_distance(pa[1], pb[0]));
      const double match = std::min(straight, crossed);
      EXPECT_LT(match, previous);
      EXPECT_LE(match, 10.0 * std::sqrt(eps));
      previous = match;
    }
  }
}

TEST(HomogeneousRoots, HandlesRootsAtZeroAndInfinity) {
  // z0 z1 (z0 - 2 z1): roots 0, 2 and infinity.
  const std::vector<cplx> c{cplx(0), cplx(-2), cplx(1), cplx(0)};
  const auto roots = homogeneous_roots(c);
  EXPECT_EQ(roots.total_multiplicity(), 3);
  EXPECT_TRUE(contains(roots, 0.0, 1));
  EXPECT_TRUE(contains(roots, 2.0, 1));
  bool inf = false;
  for (const auto& r : roots) inf = inf || (r.point.is_infinity() && r.multiplicity == 1);
  EXPECT_TRUE(inf);
}

TEST(HomogeneousRoots, AberthOnWilkinsonLikePolynomial) {
  // prod_{k=1}^{8} (t - k/4): well separated real roots.
  std::vector<cplx> a{cplx(1)};
  for (int k = 1; k <= 8; ++k) {
    std::vector<cplx> next(a.size() + 1, cplx(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
      next[i + 1] += a[i];
      next[i] -= a[i] * (k / 4.0);
    }
    a = next;
  }
  const auto roots = homogeneous_roots(a);
  EXPECT_EQ(roots.size(), 8u);
  for (int k = 1; k <= 8; ++k) EXPECT_TRUE(contains(roots, k / 4.0, 1, 1e-9)) << k;
}

TEST(BackwardTree, DepthZeroIsRoot) {
  const auto t = backward_tree(z2(), make_field("cos_re"), SpherePoint::from_affine(1.0), 0);
  ASSERT_EQ(t.leaves.size(), 1u);
  EXPECT_TRUE(projectively_equal(t.leaves[0].point, t.root));
  EXPECT_EQ(t.leaves[0].log_weight, 0.0);
}

TEST(BackwardTree, FourthRootsOfUnity) {
  const auto t = backward_tree(z2(), ScalarField(), SpherePoint::from_affine(1.0), 2);
  ASSERT_EQ(t.leaves.size(), 4u);
  for (cplx z : {cplx(1), cplx(-1), cplx(0, 1), cplx(0, -1)}) {
    bool found = false;
    for (const auto& l : t.leaves) {
      found = found || (fs_distance(l.point, SpherePoint::from_affine(z)) < 1e-12 && l.log_weight == 0.0);
    }
    EXPECT_TRUE(found);
  }
}

TEST(BackwardTree, BirkhoffLogWeights) {
  const auto t = backward_tree(z2(), make_field("cos_re"), SpherePoint::from_affine(1.0), 1);
  ASSERT_EQ(t.leaves.size(), 2u);
  for (const auto& l : t.leaves) {
    const double x = l.point.affine().real();
    EXPECT_NEAR(l.log_weight, x, 1e-14);
    EXPECT_NEAR(std::abs(x), 1.0, 1e-14);
  }
}

TEST(BackwardTree, LeafCountAndForwardImage) {
  std::mt19937_64 gen(7);
  const auto w = make_field("cos_re", {{"amplitude", 0.3}});
  for (const auto& f : harness::builtin_maps()) {
    const auto y = random_point(gen);
    const auto t = backward_tree(f, w, y, 8);
    EXPECT_EQ(t.total_multiplicity(), 256);
    for (const auto& l : t.leaves) {
      ASSERT_LE(fs_distance(f.iterate(l.point, 8), y), 1e-9) << f.label();
      double s = 0.0;
      SpherePoint x = l.point;
      for (int j = 0; j < 8; ++j, x = f(x)) s += w(x);
      ASSERT_NEAR(l.log_weight, s, 1e-9);
    }
  }
}

TEST(BackwardTree, ConcatenationProperty) {
  const auto f = harness::builtin_map("z2_plus_quarter_i");
  const auto w = make_field("cos_re", {{"amplitude", 0.2}});
  const auto y = SpherePoint::from_affine(cplx(0.4, -0.7));
  const auto full = backward_tree(f, w, y, 7);
  const auto top = backward_tree(f, w, y, 3);
  std::vector<TreeLeaf> joined;
  for (const auto& l : top.leaves) {
    for (const auto& s : backward_tree(f, w, l.point, 4).leaves) {
      joined.push_back({s.point, s.log_weight + l.log_weight, s.multiplicity * l.multiplicity});
    }
  }
  ASSERT_EQ(joined.size(), full.leaves.size());
  for (std::size_t i = 0; i < joined.size(); ++i) {
    EXPECT_LE(fs_distance(joined[i].point, full.leaves[i].point), 1e-12);
    EXPECT_NEAR(joined[i].log_weight, full.leaves[i].log_weight, 1e-12);
  }
}

TEST(BackwardTree, MultiplicityAtCriticalValue) {
  const auto t = backward_tree(z2(), ScalarField(), SpherePoint::from_affine(0.0), 5);
  ASSERT_EQ(t.leaves.size(), 1u);
  EXPECT_EQ(t.leaves[0].multiplicity, 32);
}

TEST(BackwardTree, LeafBudget) {
  TreeOptions opts;
  opts.leaf_budget = 1000;
  EXPECT_THROW(backward_tree(z2(), ScalarField(), SpherePoint::from_affine(1.0), 10, opts), LeafBudgetExceeded);
  EXPECT_NO_THROW(backward_tree(z2(), ScalarField(), SpherePoint::from_affine(1.0), 9, opts));
  EXPECT_THROW(backward_tree(z2(), ScalarField(), SpherePoint::from_affine(1.0), -1), PreconditionViolation);
}

TEST(BackwardTree, ReduceMatchesStoredTreeAcrossThreadCounts) {
  const auto f = harness::builtin_map("rat_half_m03");
  const auto w = make_field("cos_re", {{"amplitude", 0.3}});
  const auto y = SpherePoint::from_affine(cplx(0.1, 0.2));
  const auto tree = backward_tree(f, w, y, 10);
  double expected = 0.0;
  for (const auto& l : tree.leaves) expected += std::exp(l.log_weight) * l.multiplicity;
  std::vector<double> results;
  for (int threads : {1, 3}) {
    set_thread_count(threads);
    results.push_back(reduce_tree(f, w, y, 10, TreeOptions{}, 0.0, [](double& acc, const TreeNode& node) {
      if (node.depth == 10) acc += std::exp(node.log_weight) * node.multiplicity;
    }));
  }
  set_thread_count(1);
  EXPECT_NEAR(results[0], expected, 1e-12 * expected);
  EXPECT_EQ(results[0], results[1]);
}

TEST(CriticalReport, Examples) {
  const auto r = critical_report(z2(), 5);
  EXPECT_EQ(r.total_multiplicity(), 2);
  EXPECT_TRUE(r.periodic_critical_flag);
  bool zero = false, inf = false;
  for (const auto& c : r.critical_points) {
    zero = zero || fs_distance(c.point, SpherePoint::from_affine(0.0)) < 1e-12;
    inf = inf || c.point.is_infinity();
  }
  EXPECT_TRUE(zero && inf);

  const auto f = harness::builtin_map("rat_1_3");
  const auto rr = critical_report(f, 20);
  EXPECT_EQ(rr.total_multiplicity(), 2);
  // Independent orbit check: the orbit of 0 is 1/3, 10/28, ... converging to an attracting fixed point.
  cplx z = 0.0;
  bool returns = false;
  for (int k = 0; k < 20; ++k) {
    z = (z * z + 1.0) / (z * z + 3.0);
    returns = returns || std::abs(z) < 1e-9;
  }
  EXPECT_EQ(rr.periodic_critical_flag, returns);
  EXPECT_THROW(critical_report(f, 0), PreconditionViolation);
}

TEST(CriticalReport, RiemannHurwitzCount) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int d = 2; d <= 6; ++d) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<cplx> p(d + 1), q(d + 1);
      for (auto& c : p) c = cplx(n(gen), n(gen));
      for (auto& c : q) c = cplx(n(gen), n(gen));
      const RationalMap f(p, q);
      EXPECT_EQ(critical_report(f, 3).total_multiplicity(), 2 * d - 2);
    }
  }
}

TEST(Corpus, MapFileRoundTrip) {
  const auto path = testing::TempDir() + "maps.yaml";
  harness::save_map_corpus(path, harness::builtin_maps());
  const auto loaded = harness::load_map_corpus(path);
  const auto original = harness::builtin_maps();
  ASSERT_EQ(loaded.size(), original.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    EXPECT_EQ(loaded[i].label(), original[i].label());
    EXPECT_EQ(loaded[i].p(), original[i].p());
    EXPECT_EQ(loaded[i].q(), original[i].q());
  }
}
