#include "ruelle/collocation.hpp"

#include <algorithm>
#include <cmath>

#include "ruelle/error.hpp"
#include "ruelle/parallel.hpp"

namespace ruelle {

Collocation::Collocation(const RationalMap& f, const ScalarField& weight, std::shared_ptr<const Mesh> mesh,
                         cplx theta, const ScalarField& observable, const RootOptions& roots)
    : mesh_(std::move(mesh)) {
  const std::size_t n = mesh_->size();
  real_ = theta.imag() == 0.0 && !weight.is_complex() && !observable.is_complex();
  struct Row {
    std::vector<std::uint32_t> col;
    std::vector<cplx> val;
  };
  auto rows = parallel_map<Row>(n, [&](std::size_t i) {
    Row row;
    for (const auto& r : f.preimages(mesh_->node(i), roots)) {
      cplx expo = weight(r.point);
      if (theta != 0.0) expo += theta * observable.complex_at(r.point);
      const cplx c = static_cast<double>(r.multiplicity) * std::exp(expo);
      const Stencil s = mesh_->stencil(r.point);
      for (int k = 0; k < s.size; ++k) {
        row.col.push_back(s.index[k]);
        row.val.push_back(c * s.weight[k]);
      }
    }
    return row;
  });
  row_ptr_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) row_ptr_[i + 1] = row_ptr_[i] + static_cast<std::uint32_t>(rows[i].col.size());
  col_.reserve(row_ptr_[n]);
  val_.reserve(row_ptr_[n]);
  for (auto& row : rows) {
    col_.insert(col_.end(), row.col.begin(), row.col.end());
    val_.insert(val_.end(), row.val.begin(), row.val.end());
  }
  if (real_) {
    real_val_.resize(val_.size());
    for (std::size_t k = 0; k < val_.size(); ++k) real_val_[k] = val_[k].real();
  }
}

void Collocation::apply(std::span<const cplx> x, std::span<cplx> y) const {
  if (x.size() != size() || y.size() != size()) throw PreconditionViolation("Collocation::apply: size mismatch");
  parallel_for(size(), [&](std::size_t i) {
    cplx s = 0.0;
    for (std::uint32_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += val_[k] * x[col_[k]];
    y[i] = s;
  });
}

void Collocation::apply(std::span<const double> x, std::span<double> y) const {
  if (!real_) throw PreconditionViolation("Collocation::apply: operator is complex");
  if (x.size() != size() || y.size() != size()) throw PreconditionViolation("Collocation::apply: size mismatch");
  parallel_for(size(), [&](std::size_t i) {
    double s = 0.0;
    for (std::uint32_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += real_val_[k] * x[col_[k]];
    y[i] = s;
  });
}

EigenPair power_iteration(const Collocation& op, double scale, const PowerOptions& opts, std::vector<cplx> start) {
  const std::size_t n = op.size();
  const auto w = op.mesh()->quadrature_weights();
  std::vector<cplx> v = start.empty() ? std::vector<cplx>(n, cplx(1.0)) : std::move(start);
  if (v.size() != n) throw PreconditionViolation("power_iteration: start vector has wrong size");

  // Reference node: the heaviest quadrature node (the first one on ties).
  std::size_t ref = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
  if (std::abs(v[ref]) == 0.0) throw PreconditionViolation("power_iteration: start vector vanishes at reference");
  const cplx v0 = v[ref];
  for (auto& x : v) x /= v0;

  std::vector<cplx> u(n);
  cplx alpha = 0.0, previous = 0.0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    op.apply(v, u);
    cplx num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      u[j] /= scale;
      num += w[j] * std::conj(v[j]) * u[j];
      den += w[j] * std::norm(v[j]);
    }
    alpha = num / den;
    double residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) residual = std::max(residual, std::abs(u[j] - alpha * v[j]));
    const bool settled = it > 1 && std::abs(alpha - previous) <= opts.tolerance * std::abs(alpha) &&
                         residual <= opts.residual_tolerance;
    previous = alpha;
    if (u[ref] == 0.0) break;
    if (settled) {
      return {alpha, std::move(v), ref, residual, it};
    }
    const cplx ur = u[ref];
    for (std::size_t j = 0; j < n; ++j) v[j] = u[j] / ur;
  }
  throw NoDominantEigenvalue("power_iteration: no dominant eigenvalue after " +
                             std::to_string(opts.max_iterations) + " iterations");
}

}  // namespace ruelle
