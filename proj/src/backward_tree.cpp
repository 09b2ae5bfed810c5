#include "ruelle/backward_tree.hpp"

#include <string>

namespace ruelle {

std::int64_t BackwardTree::total_multiplicity() const {
  std::int64_t total = 0;
  for (const auto& l : leaves) total += l.multiplicity;
  return total;
}

void check_leaf_budget(int degree, int n, std::size_t budget) {
  if (n < 0) throw PreconditionViolation("backward tree depth must be non-negative");
  double leaves = 1.0;
  for (int i = 0; i < n; ++i) leaves *= degree;
  if (leaves > static_cast<double>(budget)) {
    throw LeafBudgetExceeded("backward tree of depth " + std::to_string(n) + " needs " +
                             std::to_string(leaves) + " leaves, budget " + std::to_string(budget));
  }
}

BackwardTree backward_tree(const RationalMap& f, const ScalarField& weight, const SpherePoint& root, int n,
                           const TreeOptions& opts) {
  check_leaf_budget(f.degree(), n, opts.leaf_budget);
  const auto wc = weight.constant_value();
  std::vector<TreeLeaf> level{TreeLeaf{root, 0.0, 1}};
  for (int k = 0; k < n; ++k) {
    // Expand each node independently, then concatenate in path order.
    auto children = parallel_map<RootSet>(level.size(), [&](std::size_t i) {
      return f.preimages(level[i].point, opts.roots);
    });
    std::vector<TreeLeaf> next;
    next.reserve(level.size() * f.degree());
    for (std::size_t i = 0; i < level.size(); ++i) {
      for (const auto& r : children[i]) {
        next.push_back(TreeLeaf{r.point, level[i].log_weight + detail::weight_at(weight, wc, r.point),
                                level[i].multiplicity * r.multiplicity});
      }
    }
    level = std::move(next);
  }
  return BackwardTree{root, n, std::move(level)};
}

int CriticalReport::total_multiplicity() const {
  int total = 0;
  for (const auto& c : critical_points) total += c.multiplicity;
  return total;
}

CriticalReport critical_report(const RationalMap& f, int horizon, double tolerance) {
  if (horizon < 1) throw PreconditionViolation("critical_report: horizon must be >= 1");
  CriticalReport report;
  report.orbit_horizon = horizon;
  for (const auto& c : f.critical_points()) {
    report.critical_points.push_back({c.point, c.multiplicity});
    SpherePoint x = c.point;
    for (int k = 1; k <= horizon; ++k) {
      x = f(x);
      if (fs_distance(x, c.point) <= tolerance) {
        report.periodic_critical_flag = true;
        break;
      }
    }
  }
  return report;
}

}  // namespace ruelle
