#ifndef FQHL_PRIME_FIELD_HPP
#define FQHL_PRIME_FIELD_HPP

#include <cstdint>
#include <string>

#include "fqhl/common.hpp"

namespace fqhl {

/// Largest supported field cardinality.
inline constexpr u64 kMaxFieldOrder = u64{1} << 31;

/// F_p for an odd or even prime p < 2^31. Multiplication uses Barrett reduction
/// with a precomputed floor(2^64 / p).
class PrimeField {
 public:
  explicit PrimeField(u32 p) : p_(p) {
    if (!is_prime_u64(p)) throw ValidationError(std::to_string(p) + " is not prime");
    if (p > kMaxFieldOrder) throw ValidationError("prime exceeds 2^31");
    barrett_ = static_cast<u64>((u128{1} << 64) / p);
  }

  u32 characteristic() const noexcept { return p_; }
  unsigned degree() const noexcept { return 1; }
  u64 order() const noexcept { return p_; }
  std::string label() const { return std::to_string(p_); }

  bool is_valid(Elem a) const noexcept { return a < p_; }

  Elem add(Elem a, Elem b) const noexcept {
    u32 s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Elem sub(Elem a, Elem b) const noexcept { return a >= b ? a - b : a + p_ - b; }
  Elem neg(Elem a) const noexcept { return a == 0 ? 0 : p_ - a; }

  Elem mul(Elem a, Elem b) const noexcept { return reduce(static_cast<u64>(a) * b); }

  /// x mod p for any x < 2^64 with x < p * 2^32 (covers products of residues).
  Elem reduce(u64 x) const noexcept {
    u64 qhat = static_cast<u64>((static_cast<u128>(x) * barrett_) >> 64);
    u64 r = x - qhat * p_;
    return static_cast<Elem>(r >= p_ ? r - p_ : r);
  }

  Elem inv(Elem a) const {
    if (a == 0) throw ValidationError("inverse of zero");
    // Extended Euclid on machine integers.
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = p_, new_r = a;
    while (new_r != 0) {
      std::int64_t quot = r / new_r;
      std::int64_t tmp = t - quot * new_t;
      t = new_t;
      new_t = tmp;
      tmp = r - quot * new_r;
      r = new_r;
      new_r = tmp;
    }
    if (t < 0) t += p_;
    return static_cast<Elem>(t);
  }

  Elem from_int(std::int64_t v) const noexcept {
    std::int64_t m = v % static_cast<std::int64_t>(p_);
    if (m < 0) m += p_;
    return static_cast<Elem>(m);
  }

  /// Coordinates over F_p of an element (a single digit here).
  void digits(Elem a, Elem* out) const noexcept { out[0] = a; }
  Elem from_digits(const Elem* in) const noexcept { return in[0]; }

  bool operator==(const PrimeField& o) const noexcept { return p_ == o.p_; }

 private:
  u32 p_;
  u64 barrett_ = 0;
};

}  // namespace fqhl

#endif  // FQHL_PRIME_FIELD_HPP
