#include "barostoch/rng.hpp"

namespace barostoch {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed) ^ mix64(index + 0x5851F42D4C957F2DULL));
}

CounterStream::result_type CounterStream::operator()() noexcept {
  const std::uint64_t n = counter_++;
  return mix64(key_ + n * kGolden);
}

}  // namespace barostoch
