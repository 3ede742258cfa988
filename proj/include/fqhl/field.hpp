#ifndef FQHL_FIELD_HPP
#define FQHL_FIELD_HPP

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "fqhl/common.hpp"
#include "fqhl/extension_field.hpp"
#include "fqhl/poly.hpp"
#include "fqhl/prime_field.hpp"

namespace fqhl {

/// A finite field chosen at run time. Every operation dispatches to the
/// concrete representation; hot loops should call visit() once and work on the
/// concrete type instead.
class Field {
 public:
  explicit Field(PrimeField f) : impl_(std::move(f)) {}
  explicit Field(ExtensionField f) : impl_(std::move(f)) {}

  template <class Fn>
  decltype(auto) visit(Fn&& fn) const {
    return std::visit(std::forward<Fn>(fn), impl_);
  }

  u32 characteristic() const noexcept {
    return visit([](const auto& f) { return f.characteristic(); });
  }
  unsigned degree() const noexcept {
    return visit([](const auto& f) { return f.degree(); });
  }
  u64 order() const noexcept {
    return visit([](const auto& f) { return f.order(); });
  }
  /// Canonical label: "p" or "p^k".
  std::string label() const {
    return visit([](const auto& f) { return f.label(); });
  }
  /// Extension modulus over F_p; the polynomial t for prime fields.
  Poly modulus() const {
    if (const auto* e = std::get_if<ExtensionField>(&impl_)) return e->modulus();
    return Poly{0, 1};
  }

  bool is_valid(Elem a) const noexcept {
    return visit([a](const auto& f) { return f.is_valid(a); });
  }
  Elem add(Elem a, Elem b) const noexcept {
    return visit([=](const auto& f) { return f.add(a, b); });
  }
  Elem sub(Elem a, Elem b) const noexcept {
    return visit([=](const auto& f) { return f.sub(a, b); });
  }
  Elem neg(Elem a) const noexcept {
    return visit([=](const auto& f) { return f.neg(a); });
  }
  Elem mul(Elem a, Elem b) const noexcept {
    return visit([=](const auto& f) { return f.mul(a, b); });
  }
  Elem inv(Elem a) const {
    return visit([=](const auto& f) { return f.inv(a); });
  }
  Elem from_int(std::int64_t v) const noexcept {
    return visit([=](const auto& f) { return f.from_int(v); });
  }
  void digits(Elem a, Elem* out) const noexcept {
    visit([=](const auto& f) { f.digits(a, out); });
  }
  Elem from_digits(const Elem* in) const noexcept {
    return visit([=](const auto& f) { return f.from_digits(in); });
  }

  friend bool operator==(const Field& a, const Field& b) {
    return a.characteristic() == b.characteristic() && a.degree() == b.degree();
  }

 private:
  std::variant<PrimeField, ExtensionField> impl_;
};

/// Deterministic construction of F_{p^k}; the extension modulus is the
/// lexicographically least monic irreducible of degree k.
inline Field field_make(u64 p, unsigned k) {
  if (k < 1) throw ValidationError("extension degree must be >= 1");
  if (!is_prime_u64(p)) throw ValidationError(std::to_string(p) + " is not prime");
  const u128 q = checked_pow(p, k);
  if (q > kMaxFieldOrder) throw ValidationError("field order " + to_string(q) + " exceeds 2^31");
  if (k == 1) return Field(PrimeField(static_cast<u32>(p)));
  return Field(ExtensionField(static_cast<u32>(p), k));
}

/// F_q for a prime power q given as a plain integer.
inline Field field_of_order(u64 q) {
  const auto ps = prime_factors(q);
  if (ps.size() != 1) throw ValidationError(std::to_string(q) + " is not a prime power");
  unsigned k = 0;
  for (u64 m = q; m > 1; m /= ps[0]) ++k;
  return field_make(ps[0], k);
}

/// Parses "p" or "p^k"; a bare prime power such as "9" is also accepted.
inline Field parse_field(std::string_view s) {
  auto parse_uint = [&](std::string_view part, const char* what) {
    u64 v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) {
      throw ValidationError("bad field spec '" + std::string(s) + "': invalid " + what);
    }
    return v;
  };
  const auto caret = s.find('^');
  if (caret == std::string_view::npos) return field_of_order(parse_uint(s, "prime"));
  const u64 k = parse_uint(s.substr(caret + 1), "degree");
  if (k > 64) throw ValidationError("field order exceeds 2^31");
  return field_make(parse_uint(s.substr(0, caret), "prime"), static_cast<unsigned>(k));
}

/// Quadratic character x^{(q-1)/2} in {-1, 0, +1}; defined for odd q only.
template <FiniteField F>
int quadratic_character(const F& field, Elem x) {
  if (field.characteristic() == 2) throw ValidationError("quadratic character undefined for even q");
  if (x == 0) return 0;
  const Elem v = field_pow(field, x, (field.order() - 1) / 2);
  if (v == 1) return 1;
  if (v == field.neg(1)) return -1;
  throw Error("quadratic character: x^((q-1)/2) is not +-1");
}

}  // namespace fqhl

#endif  // FQHL_FIELD_HPP
