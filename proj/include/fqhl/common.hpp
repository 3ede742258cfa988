#ifndef FQHL_COMMON_HPP
#define FQHL_COMMON_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fqhl {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Field elements are canonical residues: sum c_i p^i with every digit in [0, p).
using Elem = std::uint32_t;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: invalid field, malformed tuple, wrong degree, ...
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computation would exceed the configured enumeration budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Polynomial text could not be parsed; offset() is the byte position of the fault.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : ValidationError(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

inline std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

/// base^exp, throwing ValidationError on 128-bit overflow.
inline u128 checked_pow(u64 base, unsigned exp) {
  u128 r = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<u128>::max() / base) {
      throw ValidationError("integer overflow computing " + std::to_string(base) + "^" +
                            std::to_string(exp));
    }
    r *= base;
  }
  return r;
}

inline u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 d : {2ULL, 3ULL, 5ULL}) {
    if (n % d == 0) return n == d;
  }
  for (u64 d = 7; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

/// Distinct prime factors in increasing order (trial division; n fits the word range).
inline std::vector<u64> prime_factors(u64 n) {
  std::vector<u64> out;
  for (u64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace fqhl

#endif  // FQHL_COMMON_HPP
