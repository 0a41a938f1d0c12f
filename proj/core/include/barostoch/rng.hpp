#pragma once

#include <cstdint>
#include <limits>

namespace barostoch {

/// SplitMix64 finalizer. Used both as the block function of the counter
/// stream and to derive independent sub-seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Sub-seed for component `index` of a sampler seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Counter-based random stream: the n-th output is mix64(key + n * golden).
/// Satisfies UniformRandomBitGenerator so it plugs into <random> distributions.
/// There is no hidden state beyond (key, counter), so two streams with the
/// same key always agree regardless of how other streams were used.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  explicit CounterStream(std::uint64_t key) noexcept : key_(mix64(key)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace barostoch
