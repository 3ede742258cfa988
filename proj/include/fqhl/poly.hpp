#ifndef FQHL_POLY_HPP
#define FQHL_POLY_HPP

#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fqhl/common.hpp"

namespace fqhl {

/// What the polynomial and counting templates require from a finite field.
template <class F>
concept FiniteField = requires(const F& f, Elem a, std::int64_t v) {
  { f.characteristic() } -> std::convertible_to<u32>;
  { f.degree() } -> std::convertible_to<unsigned>;
  { f.order() } -> std::convertible_to<u64>;
  { f.add(a, a) } -> std::same_as<Elem>;
  { f.sub(a, a) } -> std::same_as<Elem>;
  { f.neg(a) } -> std::same_as<Elem>;
  { f.mul(a, a) } -> std::same_as<Elem>;
  { f.inv(a) } -> std::same_as<Elem>;
  { f.from_int(v) } -> std::same_as<Elem>;
  { f.is_valid(a) } -> std::same_as<bool>;
};

/// x^e by square-and-multiply; 0^0 = 1.
template <FiniteField F>
Elem field_pow(const F& field, Elem x, u128 e) {
  Elem result = 1;
  while (e != 0) {
    if (e & 1) result = field.mul(result, x);
    e >>= 1;
    if (e != 0) x = field.mul(x, x);
  }
  return result;
}

/// Dense univariate polynomial; coeffs()[i] is the coefficient of x^i. The
/// representation carries no field: every algorithm takes the field explicitly.
/// Invariant: no trailing zero coefficient, so the zero polynomial is empty.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<Elem> coeffs) : c_(std::move(coeffs)) { trim(); }
  Poly(std::initializer_list<Elem> coeffs) : c_(coeffs) { trim(); }

  static Poly monomial(std::size_t deg, Elem coeff = 1) {
    std::vector<Elem> c(deg + 1, 0);
    c[deg] = coeff;
    return Poly(std::move(c));
  }
  static Poly constant(Elem c) { return Poly(std::vector<Elem>{c}); }

  bool is_zero() const noexcept { return c_.empty(); }
  /// Degree, or nullopt for the zero polynomial.
  std::optional<std::size_t> degree() const noexcept {
    if (c_.empty()) return std::nullopt;
    return c_.size() - 1;
  }
  /// Degree for callers that have already excluded zero.
  std::size_t deg() const noexcept { return c_.size() - 1; }
  Elem lead() const noexcept { return c_.empty() ? 0 : c_.back(); }
  Elem operator[](std::size_t i) const noexcept { return i < c_.size() ? c_[i] : 0; }
  std::size_t size() const noexcept { return c_.size(); }
  bool is_monic() const noexcept { return !c_.empty() && c_.back() == 1; }
  bool is_constant() const noexcept { return c_.size() <= 1; }

  const std::vector<Elem>& coeffs() const noexcept { return c_; }
  std::span<const Elem> span() const noexcept { return c_; }

  void set(std::size_t i, Elem v) {
    if (i >= c_.size()) c_.resize(i + 1, 0);
    c_[i] = v;
    trim();
  }

  friend bool operator==(const Poly&, const Poly&) = default;
  friend auto operator<=>(const Poly& a, const Poly& b) {
    // Degree first, then coefficients from the top down.
    if (auto c = a.c_.size() <=> b.c_.size(); c != 0) return c;
    for (std::size_t i = a.c_.size(); i-- > 0;) {
      if (auto c = a.c_[i] <=> b.c_[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Elem> c_;
};

namespace detail {
inline void trim(std::vector<Elem>& v) {
  while (!v.empty() && v.back() == 0) v.pop_back();
}
}  // namespace detail

template <FiniteField F>
Poly poly_add(const F& field, const Poly& a, const Poly& b) {
  std::vector<Elem> out(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = field.add(a[i], b[i]);
  return Poly(std::move(out));
}

template <FiniteField F>
Poly poly_sub(const F& field, const Poly& a, const Poly& b) {
  std::vector<Elem> out(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = field.sub(a[i], b[i]);
  return Poly(std::move(out));
}

template <FiniteField F>
Poly poly_neg(const F& field, const Poly& a) {
  std::vector<Elem> out(a.coeffs());
  for (auto& c : out) c = field.neg(c);
  return Poly(std::move(out));
}

template <FiniteField F>
Poly poly_scale(const F& field, const Poly& a, Elem s) {
  std::vector<Elem> out(a.coeffs());
  for (auto& c : out) c = field.mul(c, s);
  return Poly(std::move(out));
}

template <FiniteField F>
Poly poly_mul(const F& field, const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Elem> out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i + j] = field.add(out[i + j], field.mul(a[i], b[j]));
    }
  }
  return Poly(std::move(out));
}

/// Quotient and remainder of a by a nonzero b.
template <FiniteField F>
std::pair<Poly, Poly> poly_divmod(const F& field, const Poly& a, const Poly& b) {
  if (b.is_zero()) throw ValidationError("polynomial division by zero");
  if (a.size() < b.size()) return {Poly{}, a};
  std::vector<Elem> rem(a.coeffs());
  std::vector<Elem> quot(a.size() - b.size() + 1, 0);
  const Elem inv_lead = field.inv(b.lead());
  const std::size_t db = b.deg();
  for (std::size_t i = rem.size(); i-- > db;) {
    Elem c = rem[i];
    if (c == 0) continue;
    if (inv_lead != 1) c = field.mul(c, inv_lead);
    quot[i - db] = c;
    for (std::size_t j = 0; j <= db; ++j) {
      rem[i - db + j] = field.sub(rem[i - db + j], field.mul(c, b[j]));
    }
  }
  rem.resize(db);
  return {Poly(std::move(quot)), Poly(std::move(rem))};
}

template <FiniteField F>
Poly poly_mod(const F& field, const Poly& a, const Poly& b) {
  return poly_divmod(field, a, b).second;
}

/// Exact quotient; throws if b does not divide a.
template <FiniteField F>
Poly poly_exact_div(const F& field, const Poly& a, const Poly& b) {
  auto [q, r] = poly_divmod(field, a, b);
  if (!r.is_zero()) throw Error("inexact polynomial division");
  return q;
}

template <FiniteField F>
Poly poly_derivative(const F& field, const Poly& a) {
  if (a.size() <= 1) return {};
  std::vector<Elem> out(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) {
    out[i - 1] = field.mul(a[i], field.from_int(static_cast<std::int64_t>(i % field.characteristic())));
  }
  return Poly(std::move(out));
}

template <FiniteField F>
Poly poly_monic(const F& field, const Poly& a) {
  if (a.is_zero() || a.lead() == 1) return a;
  return poly_scale(field, a, field.inv(a.lead()));
}

/// Monic gcd; zero only when both inputs are zero.
template <FiniteField F>
Poly poly_gcd(const F& field, Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly r = poly_mod(field, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return poly_monic(field, a);
}

template <FiniteField F>
Elem poly_eval(const F& field, const Poly& a, Elem x) {
  Elem acc = 0;
  for (std::size_t i = a.size(); i-- > 0;) acc = field.add(field.mul(acc, x), a[i]);
  return acc;
}

/// a(t + c), re-expanded by Horner's rule.
template <FiniteField F>
Poly poly_shift(const F& field, const Poly& a, Elem c) {
  Poly acc;
  const Poly lin{c, 1};
  for (std::size_t i = a.size(); i-- > 0;) {
    acc = poly_add(field, poly_mul(field, acc, lin), Poly::constant(a[i]));
  }
  return acc;
}

/// base^e mod modulus, deg(modulus) >= 1.
template <FiniteField F>
Poly poly_powmod(const F& field, const Poly& base, u128 e, const Poly& modulus) {
  if (modulus.size() < 2) throw ValidationError("powmod modulus must have degree >= 1");
  Poly result = Poly::constant(1);
  Poly b = poly_mod(field, base, modulus);
  while (e != 0) {
    if (e & 1) result = poly_mod(field, poly_mul(field, result, b), modulus);
    e >>= 1;
    if (e != 0) b = poly_mod(field, poly_mul(field, b, b), modulus);
  }
  return result;
}

}  // namespace fqhl

#endif  // FQHL_POLY_HPP
