#ifndef FQHL_RANDOM_HPP
#define FQHL_RANDOM_HPP

#include <cstdint>

#include "fqhl/common.hpp"

namespace fqhl {

/// SplitMix64 finalizer.
constexpr u64 mix64(u64 z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream: the j-th word of stream (seed, index) is a pure
/// function of the triple, so draws can be split across workers in any order.
class CounterStream {
 public:
  CounterStream(u64 seed, u64 index) noexcept : key_(mix64(seed ^ mix64(index ^ 0x6a09e667f3bcc909ULL))) {}

  u64 next() noexcept { return mix64(key_ + mix64(counter_++)); }

  /// Uniform integer in [0, bound), bound >= 1 (Lemire's multiply-and-reject).
  u64 below(u64 bound) noexcept {
    u64 x = next();
    u128 m = static_cast<u128>(x) * bound;
    u64 low = static_cast<u64>(m);
    if (low < bound) {
      const u64 threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = next();
        m = static_cast<u128>(x) * bound;
        low = static_cast<u64>(m);
      }
    }
    return static_cast<u64>(m >> 64);
  }

 private:
  u64 key_;
  u64 counter_ = 0;
};

}  // namespace fqhl

#endif  // FQHL_RANDOM_HPP
