#pragma once

#include <cstdint>

namespace ruelle {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream: the k-th draw of stream s under master seed m is a
/// pure function of (m, s, k), so independent chains can be scheduled on any
/// thread without changing their output.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  StreamRng(std::uint64_t master_seed, std::uint64_t stream)
      : key_(mix64(master_seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return mix64(key_ + counter_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t draws() const { return counter_ / 0x9e3779b97f4a7c15ULL; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ruelle
