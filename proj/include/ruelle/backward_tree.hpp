#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "ruelle/error.hpp"
#include "ruelle/parallel.hpp"
#include "ruelle/rational_map.hpp"
#include "ruelle/scalar_field.hpp"

namespace ruelle {

struct TreeOptions {
  /// Upper bound on d^n for any expansion (stored or streamed).
  std::size_t leaf_budget = std::size_t{1} << 22;
  RootOptions roots;
};

struct TreeLeaf {
  SpherePoint point;
  double log_weight = 0.0;  ///< phi(a) + phi(f a) + ... + phi(f^{n-1} a)
  std::int64_t multiplicity = 1;
};

/// f^{-n}(root) as a multiset, leaves ordered by root-index path.
struct BackwardTree {
  SpherePoint root;
  int depth = 0;
  std::vector<TreeLeaf> leaves;

  std::int64_t total_multiplicity() const;
};

/// Throws LeafBudgetExceeded if d^n exceeds the budget.
void check_leaf_budget(int degree, int n, std::size_t budget);

BackwardTree backward_tree(const RationalMap& f, const ScalarField& weight, const SpherePoint& root, int n,
                           const TreeOptions& opts = {});

/// A node of the backward tree as seen by tree walkers.
struct TreeNode {
  SpherePoint point;
  double log_weight = 0.0;
  std::int64_t multiplicity = 1;
  int depth = 0;
  /// theta * (g(a) + g(f a) + ... ) for twisted walks; zero otherwise.
  cplx twist = 0.0;
};

/// Optional complex twist theta * S_n g carried along a walk.
struct TreeTwist {
  const ScalarField* observable = nullptr;
  cplx theta = 0.0;
};

namespace detail {

inline double weight_at(const ScalarField& w, const std::optional<double>& c, const SpherePoint& x) {
  return c ? *c : w(x);
}

inline TreeNode child_node(const ScalarField& w, const std::optional<double>& wc, const TreeTwist& tw,
                           const TreeNode& parent, const ProjectiveRoot& r) {
  TreeNode child{r.point, parent.log_weight + weight_at(w, wc, r.point), parent.multiplicity * r.multiplicity,
                 parent.depth + 1, parent.twist};
  if (tw.observable) child.twist += tw.theta * tw.observable->complex_at(r.point);
  return child;
}

template <class Acc, class Visit>
void walk_subtree(const RationalMap& f, const ScalarField& w, const std::optional<double>& wc, const TreeTwist& tw,
                  const TreeNode& node, int n, const RootOptions& ropts, Acc& acc, Visit& visit) {
  visit(acc, node);
  if (node.depth == n) return;
  const RootSet pre = f.preimages(node.point, ropts);
  for (const auto& r : pre) walk_subtree(f, w, wc, tw, child_node(w, wc, tw, node, r), n, ropts, acc, visit);
}

}  // namespace detail

/// Visits every node of the depth-n backward tree of `root` (depths 0..n),
/// calling visit(acc, node). Subtrees below a fixed split level are handled
/// as independent tasks with their own accumulators, which are then combined
/// with `acc += part` in path order. The split level depends only on (d, n),
/// so the result is independent of the thread count.
template <class Acc, class Visit>
Acc reduce_tree(const RationalMap& f, const ScalarField& weight, const SpherePoint& root, int n,
                const TreeOptions& opts, Acc init, Visit visit, const TreeTwist& twist = {}) {
  check_leaf_budget(f.degree(), n, opts.leaf_budget);
  const auto wc = weight.constant_value();
  // Breadth-first down to the split level, visiting shallow nodes serially.
  int split = 0;
  std::size_t width = 1;
  while (split < n && width < 64) {
    width *= static_cast<std::size_t>(f.degree());
    ++split;
  }
  Acc acc = init;
  std::vector<TreeNode> frontier{TreeNode{root, 0.0, 1, 0, 0.0}};
  for (int level = 0; level < split; ++level) {
    std::vector<TreeNode> next;
    next.reserve(frontier.size() * f.degree());
    for (const auto& node : frontier) {
      visit(acc, node);
      for (const auto& r : f.preimages(node.point, opts.roots)) {
        next.push_back(detail::child_node(weight, wc, twist, node, r));
      }
    }
    frontier = std::move(next);
  }
  std::vector<Acc> parts(frontier.size(), init);
  parallel_for(frontier.size(), [&](std::size_t i) {
    Visit local = visit;
    detail::walk_subtree(f, weight, wc, twist, frontier[i], n, opts.roots, parts[i], local);
  });
  for (const auto& part : parts) acc += part;
  return acc;
}

struct CriticalPoint {
  SpherePoint point;
  int multiplicity = 1;
};

struct CriticalReport {
  std::vector<CriticalPoint> critical_points;
  bool periodic_critical_flag = false;
  int orbit_horizon = 0;

  int total_multiplicity() const;
};

/// Critical points and whether any of them is periodic within `horizon`
/// iterates. A periodic critical point means the local degree of f^n grows
/// exponentially along its cycle.
CriticalReport critical_report(const RationalMap& f, int horizon, double tolerance = 1e-9);

}  // namespace ruelle
