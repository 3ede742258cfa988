#ifndef FQHL_BIPOLY_HPP
#define FQHL_BIPOLY_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fqhl/common.hpp"
#include "fqhl/poly.hpp"

namespace fqhl {

/// Polynomial in t whose coefficients are polynomials in U: coeffs_in_t[i] is
/// the coefficient of t^i.
struct BiPoly {
  std::vector<Poly> coeffs_in_t;

  std::size_t degree_t() const noexcept { return coeffs_in_t.empty() ? 0 : coeffs_in_t.size() - 1; }
  bool is_monic_in_t() const noexcept {
    return !coeffs_in_t.empty() && coeffs_in_t.back() == Poly::constant(1);
  }
  friend bool operator==(const BiPoly&, const BiPoly&) = default;
};

/// t^n + u_1 t^{n-1} + ... + u_{n-1} t + U + a(t), with the constant coefficient
/// of the generic family left free as U.
template <FiniteField F>
BiPoly specialize_family(const F& field, std::span<const Elem> u, const Poly& a, std::size_t n) {
  if (n < 1) throw ValidationError("family degree must be >= 1");
  if (u.size() != n - 1) {
    throw ValidationError("expected " + std::to_string(n - 1) + " specialized coefficients, got " +
                          std::to_string(u.size()));
  }
  if (!a.is_zero() && a.deg() >= n) throw ValidationError("offset degree must be < n");
  BiPoly out;
  out.coeffs_in_t.resize(n + 1);
  out.coeffs_in_t[n] = Poly::constant(1);
  for (std::size_t i = 1; i < n; ++i) out.coeffs_in_t[n - i] = Poly::constant(field.add(u[i - 1], a[n - i]));
  out.coeffs_in_t[0] = Poly{a[0], 1};
  return out;
}

/// Determinant of a square matrix over F_q[U] by Bareiss fraction-free
/// elimination with row pivoting. Every division is exact.
template <FiniteField F>
Poly bareiss_determinant(const F& field, std::vector<std::vector<Poly>> m) {
  const std::size_t size = m.size();
  if (size == 0) return Poly::constant(1);
  bool negate = false;
  Poly prev = Poly::constant(1);
  for (std::size_t k = 0; k + 1 < size; ++k) {
    if (m[k][k].is_zero()) {
      std::size_t pivot = k + 1;
      while (pivot < size && m[pivot][k].is_zero()) ++pivot;
      if (pivot == size) return {};
      std::swap(m[k], m[pivot]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < size; ++i) {
      for (std::size_t j = k + 1; j < size; ++j) {
        Poly num = poly_sub(field, poly_mul(field, m[k][k], m[i][j]), poly_mul(field, m[i][k], m[k][j]));
        m[i][j] = poly_exact_div(field, num, prev);
      }
      m[i][k] = Poly{};
    }
    prev = m[k][k];
  }
  Poly det = std::move(m[size - 1][size - 1]);
  return negate ? poly_neg(field, det) : det;
}

/// disc_t(F) as a polynomial in U: (-1)^{n(n-1)/2} times the determinant of the
/// (2n-1)x(2n-1) Sylvester matrix of (F, dF/dt), dF/dt taken at formal degree n-1.
template <FiniteField F>
Poly disc_in_t(const F& field, const BiPoly& bp) {
  const std::size_t n = bp.degree_t();
  if (!bp.is_monic_in_t()) throw ValidationError("disc_in_t requires a polynomial monic in t");
  if (n < 2) throw ValidationError("disc_in_t requires degree >= 2 in t");
  const std::size_t size = 2 * n - 1;
  std::vector<Poly> deriv(n);  // deriv[j] = coefficient of t^j in dF/dt
  for (std::size_t j = 1; j <= n; ++j) {
    deriv[j - 1] = poly_scale(field, bp.coeffs_in_t[j],
                              field.from_int(static_cast<std::int64_t>(j % field.characteristic())));
  }
  std::vector<std::vector<Poly>> m(size, std::vector<Poly>(size));
  for (std::size_t row = 0; row + 1 < n; ++row) {
    for (std::size_t i = 0; i <= n; ++i) m[row][row + i] = bp.coeffs_in_t[n - i];
  }
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t i = 0; i < n; ++i) m[n - 1 + row][row + i] = deriv[n - 1 - i];
  }
  Poly det = bareiss_determinant(field, std::move(m));
  if ((n * (n - 1) / 2) % 2 == 1) det = poly_neg(field, det);
  return det;
}

/// Substitutes U := c, giving a polynomial in t.
template <FiniteField F>
Poly evaluate_at_u(const F& field, const BiPoly& bp, Elem c) {
  std::vector<Elem> out(bp.coeffs_in_t.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = poly_eval(field, bp.coeffs_in_t[i], c);
  return Poly(std::move(out));
}

}  // namespace fqhl

#endif  // FQHL_BIPOLY_HPP
