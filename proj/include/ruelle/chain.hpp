#pragma once

#include <cstdint>
#include <vector>

#include "ruelle/rng.hpp"
#include "ruelle/transfer.hpp"

namespace ruelle {

/// Backward Markov chain with kernel
///   P(y -> a) = mult(a) e^{phi(a)} rho(a) / (lambda rho(y)),
/// renormalized over the preimages at every step. Its stationary law is the
/// equilibrium measure mu, and a reversed window x_N, ..., x_{N-k} is a
/// forward orbit segment of x_N.
class BackwardChain {
 public:
  /// Starts at a Julia point drawn from (master_seed, stream).
  BackwardChain(const TransferContext& ctx, std::uint64_t master_seed, std::uint64_t stream);

  const SpherePoint& state() const { return state_; }
  std::uint64_t steps() const { return steps_; }
  const SpherePoint& step();

  struct Branch {
    SpherePoint point;
    double probability = 0.0;
  };
  /// Transition probabilities out of y.
  std::vector<Branch> transitions(const SpherePoint& y) const;

 private:
  const TransferContext* ctx_;
  StreamRng rng_;
  SpherePoint state_;
  std::uint64_t steps_ = 0;
  bool uniform_ = false;
};

/// `length` consecutive states after `burn_in` steps, on stream `stream` of
/// the context seed.
std::vector<SpherePoint> sample_equilibrium_chain(const TransferContext& ctx, std::size_t length, std::size_t burn_in,
                                                  std::uint64_t stream = 0);

}  // namespace ruelle
