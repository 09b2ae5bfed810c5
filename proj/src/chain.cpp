#include "ruelle/chain.hpp"

#include <array>
#include <cmath>

#include "ruelle/error.hpp"

namespace ruelle {

BackwardChain::BackwardChain(const TransferContext& ctx, std::uint64_t master_seed, std::uint64_t stream)
    : ctx_(&ctx), rng_(master_seed, stream) {
  if (!ctx.calibrated()) throw PreconditionViolation("BackwardChain: context not calibrated");
  state_ = julia_points(ctx.map(), ctx.circle_system(), 1, mix64(master_seed ^ mix64(~stream)))[0];
  uniform_ = ctx.weight().constant_value().has_value() && ctx.rho().constant_value().has_value();
}

const SpherePoint& BackwardChain::step() {
  const RootSet pre = ctx_->map().preimages(state_, ctx_->options().tree.roots);
  std::array<double, kMaxDegree> cumulative{};
  double total = 0.0;
  for (std::size_t i = 0; i < pre.size(); ++i) {
    double w = static_cast<double>(pre[i].multiplicity);
    if (!uniform_) w *= std::exp(ctx_->weight()(pre[i].point)) * ctx_->rho()(pre[i].point);
    total += w;
    cumulative[i] = total;
  }
  const double u = rng_.uniform() * total;
  std::size_t pick = 0;
  while (pick + 1 < pre.size() && u >= cumulative[pick]) ++pick;
  state_ = pre[pick].point;
  ++steps_;
  return state_;
}

std::vector<BackwardChain::Branch> BackwardChain::transitions(const SpherePoint& y) const {
  const RootSet pre = ctx_->map().preimages(y, ctx_->options().tree.roots);
  std::vector<Branch> out;
  double total = 0.0;
  for (const auto& r : pre) {
    const double w = static_cast<double>(r.multiplicity) * std::exp(ctx_->weight()(r.point)) * ctx_->rho()(r.point);
    out.push_back({r.point, w});
    total += w;
  }
  for (auto& b : out) b.probability /= total;
  return out;
}

std::vector<SpherePoint> sample_equilibrium_chain(const TransferContext& ctx, std::size_t length, std::size_t burn_in,
                                                  std::uint64_t stream) {
  BackwardChain chain(ctx, ctx.options().seed, stream);
  for (std::size_t i = 0; i < burn_in; ++i) chain.step();
  std::vector<SpherePoint> out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) out.push_back(chain.step());
  return out;
}

}  // namespace ruelle
