#ifndef FQHL_FQPOLY_HPP
#define FQHL_FQPOLY_HPP

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "fqhl/common.hpp"
#include "fqhl/poly.hpp"

namespace fqhl {

/// Resultant of nonzero f and g with respect to their actual degrees.
///
/// Euclidean recurrence: with r = f mod g, m = deg f, n = deg g,
///   Res(f, g) = (-1)^{mn} lc(g)^{m - deg r} Res(g, r),
/// terminating at a constant argument c where Res(h, c) = c^{deg h}.
template <FiniteField F>
Elem resultant(const F& field, Poly f, Poly g) {
  if (f.is_zero() || g.is_zero()) throw ValidationError("resultant of the zero polynomial");
  Elem acc = 1;
  for (;;) {
    const std::size_t m = f.deg();
    const std::size_t n = g.deg();
    if (n == 0) return field.mul(acc, field_pow(field, g.lead(), m));
    if (m == 0) return field.mul(acc, field_pow(field, f.lead(), n));
    Poly r = poly_mod(field, f, g);
    if (r.is_zero()) return 0;
    if ((m * n) % 2 == 1) acc = field.neg(acc);
    acc = field.mul(acc, field_pow(field, g.lead(), m - r.deg()));
    f = std::move(g);
    g = std::move(r);
  }
}

/// disc(f) = (-1)^{n(n-1)/2} Res(f, f') for f normalized to monic, deg f = n >= 1.
///
/// When f' has degree below n - 1 the Sylvester matrix is still taken at formal
/// degree n - 1; for monic f the extra leading rows contribute a factor 1. A
/// vanishing derivative gives discriminant zero.
template <FiniteField F>
Elem discriminant(const F& field, const Poly& f_in) {
  if (f_in.is_zero() || f_in.deg() == 0) throw ValidationError("discriminant of a constant polynomial");
  const Poly f = poly_monic(field, f_in);
  const std::size_t n = f.deg();
  if (n == 1) return 1;
  const Poly df = poly_derivative(field, f);
  if (df.is_zero()) return 0;
  Elem res = resultant(field, f, df);
  if ((n * (n - 1) / 2) % 2 == 1) res = field.neg(res);
  return res;
}

template <FiniteField F>
bool is_squarefree(const F& field, const Poly& f) {
  if (f.is_zero()) throw ValidationError("square-free test of the zero polynomial");
  if (f.deg() == 0) return true;
  const Poly df = poly_derivative(field, f);
  if (df.is_zero()) return false;
  return poly_gcd(field, f, df).deg() == 0;
}

namespace detail {

inline std::vector<unsigned> prime_divisors(unsigned n) {
  std::vector<unsigned> out;
  for (u64 p : prime_factors(n)) out.push_back(static_cast<unsigned>(p));
  return out;
}

/// Matrix of the q-power map on F_q[t]/(f): column i holds t^{iq} mod f.
template <FiniteField F>
class FrobeniusMap {
 public:
  FrobeniusMap(const F& field, const Poly& f) : field_(&field), f_(f) {
    const std::size_t n = f.deg();
    const Poly x = poly_powmod(field, Poly{0, 1}, field.order(), f);
    cols_.reserve(n);
    Poly power = Poly::constant(1);
    for (std::size_t i = 0; i < n; ++i) {
      cols_.push_back(power);
      power = poly_mod(field, poly_mul(field, power, x), f);
    }
  }

  /// g^q mod f for deg g < deg f.
  Poly apply(const Poly& g) const {
    std::vector<Elem> out(f_.deg(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i] == 0) continue;
      const Poly& col = cols_[i];
      for (std::size_t j = 0; j < col.size(); ++j) {
        out[j] = field_->add(out[j], field_->mul(g[i], col[j]));
      }
    }
    return Poly(std::move(out));
  }

 private:
  const F* field_;
  Poly f_;
  std::vector<Poly> cols_;
};

}  // namespace detail

/// Rabin's criterion: f of degree n >= 1 is irreducible iff t^{q^n} = t mod f and
/// gcd(t^{q^{n/l}} - t, f) = 1 for every prime l | n.
template <FiniteField F>
bool is_irreducible(const F& field, const Poly& f_in) {
  if (f_in.is_zero() || f_in.deg() == 0) throw ValidationError("irreducibility test of a constant polynomial");
  const Poly f = poly_monic(field, f_in);
  const std::size_t n = f.deg();
  if (n == 1) return true;
  const detail::FrobeniusMap<F> frob(field, f);
  const Poly t{0, 1};
  const auto ells = detail::prime_divisors(static_cast<unsigned>(n));
  Poly h = poly_mod(field, t, f);
  for (std::size_t d = 1; d <= n; ++d) {
    h = frob.apply(h);
    for (unsigned ell : ells) {
      if (n / ell == d && poly_gcd(field, poly_sub(field, h, t), f).deg() != 0) return false;
    }
  }
  return h == poly_mod(field, t, f);
}

/// Irreducible factor degrees of a monic square-free f, ascending, by
/// distinct-degree factorization. With radical_first the input is replaced by
/// its square-free part f / gcd(f, f') first (only valid when f' != 0).
template <FiniteField F>
std::vector<unsigned> factor_degrees(const F& field, const Poly& f_in, bool radical_first = false) {
  if (f_in.is_zero() || f_in.deg() == 0) throw ValidationError("factor_degrees of a constant polynomial");
  Poly f = poly_monic(field, f_in);
  if (!is_squarefree(field, f)) {
    if (!radical_first) throw ValidationError("factor_degrees requires a square-free polynomial");
    const Poly df = poly_derivative(field, f);
    if (df.is_zero()) throw ValidationError("radical preprocessing of a p-th power is unsupported");
    f = poly_exact_div(field, f, poly_gcd(field, f, df));
  }
  std::vector<unsigned> out;
  if (f.deg() == 1) return {1};
  const detail::FrobeniusMap<F> frob(field, f);
  const Poly t{0, 1};
  Poly rest = f;
  Poly h = poly_mod(field, t, f);  // t^{q^d} mod f
  for (std::size_t d = 1; 2 * d <= rest.deg(); ++d) {
    h = frob.apply(h);
    const Poly g = poly_gcd(field, rest, poly_sub(field, poly_mod(field, h, rest), t));
    if (g.deg() > 0) {
      for (std::size_t i = 0; i < g.deg() / d; ++i) out.push_back(static_cast<unsigned>(d));
      rest = poly_exact_div(field, rest, g);
    }
  }
  if (rest.deg() > 0) out.push_back(static_cast<unsigned>(rest.deg()));
  std::sort(out.begin(), out.end());
  return out;
}

/// Number of monic irreducible polynomials of degree n over F_q:
/// (1/n) sum_{d | n} mu(d) q^{n/d}.
inline u128 irreducible_count(u64 q, unsigned n) {
  if (n < 1) throw ValidationError("irreducible_count requires n >= 1");
  // Signed accumulation in two unsigned halves to stay in 128 bits.
  u128 plus = 0, minus = 0;
  for (unsigned d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    int mu = 1;
    unsigned m = d;
    bool square = false;
    for (unsigned p = 2; p * p <= m; ++p) {
      if (m % p == 0) {
        m /= p;
        if (m % p == 0) square = true;
        mu = -mu;
      }
    }
    if (m > 1) mu = -mu;
    if (square) continue;
    const u128 term = checked_pow(q, n / d);
    (mu > 0 ? plus : minus) += term;
  }
  return (plus - minus) / n;
}

/// Irreducibility tester specialised for repeated tests of monic polynomials of
/// one degree: scratch buffers are reused and the q-power is taken with a
/// Frobenius matrix, so no allocation happens per test.
template <FiniteField F>
class RabinTester {
 public:
  RabinTester(const F& field, std::size_t n) : field_(&field), n_(n) {
    if (n < 1) throw ValidationError("RabinTester degree must be >= 1");
    ells_ = detail::prime_divisors(static_cast<unsigned>(n));
    f_.assign(n + 1, 0);
    prod_.assign(2 * n, 0);
    x_.assign(n, 0);
    h_.assign(n, 0);
    tmp_.assign(n, 0);
    cols_.assign(n * n, 0);
    ga_.assign(n + 1, 0);
    gb_.assign(n + 1, 0);
    u64 q = field.order();
    qbits_ = 0;
    while ((q >> qbits_) > 1) ++qbits_;
  }

  std::size_t degree() const noexcept { return n_; }

  /// coeffs has n + 1 entries with coeffs[n] == 1.
  bool operator()(std::span<const Elem> coeffs) {
    const std::size_t n = n_;
    if (n == 1) return true;
    std::copy(coeffs.begin(), coeffs.end(), f_.begin());
    compute_x();
    // Linear-factor early exit: a root in F_q means gcd(t^q - t, f) != 1.
    std::copy(x_.begin(), x_.end(), h_.begin());
    if (!coprime_with_h_minus_t()) return false;
    build_columns();
    for (std::size_t d = 2; d <= n; ++d) {
      apply_frobenius();
      for (unsigned ell : ells_) {
        if (n / ell == d && !coprime_with_h_minus_t()) return false;
      }
    }
    // h == t mod f (n >= 2 so t is reduced).
    for (std::size_t i = 0; i < n; ++i) {
      if (h_[i] != (i == 1 ? 1u : 0u)) return false;
    }
    return true;
  }

 private:
  // out = a * b mod f; a, b, out have n entries, out may alias neither.
  void mulmod(const Elem* a, const Elem* b, Elem* out) {
    const F& fld = *field_;
    const std::size_t n = n_;
    std::fill(prod_.begin(), prod_.begin() + (2 * n - 1), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) prod_[i + j] = fld.add(prod_[i + j], fld.mul(a[i], b[j]));
    }
    reduce_prod(2 * n - 1);
    std::copy(prod_.begin(), prod_.begin() + n, out);
  }

  // Reduce prod_[0 .. len) modulo the monic f_ in place.
  void reduce_prod(std::size_t len) {
    const F& fld = *field_;
    const std::size_t n = n_;
    for (std::size_t i = len; i-- > n;) {
      const Elem c = prod_[i];
      if (c == 0) continue;
      prod_[i] = 0;
      for (std::size_t j = 0; j < n; ++j) prod_[i - n + j] = fld.sub(prod_[i - n + j], fld.mul(c, f_[j]));
    }
  }

  // x_ = t^q mod f by left-to-right square-and-multiply (multiplying by t is a shift).
  void compute_x() {
    const std::size_t n = n_;
    const u64 q = field_->order();
    std::fill(x_.begin(), x_.end(), 0);
    x_[1] = 1;
    for (int b = static_cast<int>(qbits_) - 1; b >= 0; --b) {
      mulmod(x_.data(), x_.data(), tmp_.data());
      if ((q >> b) & 1) {
        std::fill(prod_.begin(), prod_.begin() + n + 1, 0);
        std::copy(tmp_.begin(), tmp_.end(), prod_.begin() + 1);
        reduce_prod(n + 1);
        std::copy(prod_.begin(), prod_.begin() + n, x_.begin());
      } else {
        std::copy(tmp_.begin(), tmp_.end(), x_.begin());
      }
    }
  }

  // cols_[i*n .. ] = x^i mod f.
  void build_columns() {
    const std::size_t n = n_;
    std::fill(cols_.begin(), cols_.end(), 0);
    cols_[0] = 1;
    if (n > 1) std::copy(x_.begin(), x_.end(), cols_.begin() + n);
    for (std::size_t i = 2; i < n; ++i) mulmod(&cols_[(i - 1) * n], x_.data(), &cols_[i * n]);
  }

  // h_ <- h_^q mod f.
  void apply_frobenius() {
    const F& fld = *field_;
    const std::size_t n = n_;
    std::fill(tmp_.begin(), tmp_.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const Elem c = h_[i];
      if (c == 0) continue;
      const Elem* col = &cols_[i * n];
      for (std::size_t j = 0; j < n; ++j) tmp_[j] = fld.add(tmp_[j], fld.mul(c, col[j]));
    }
    std::swap(h_, tmp_);
  }

  // gcd(h_ - t, f) == 1, Euclid on the scratch buffers.
  bool coprime_with_h_minus_t() {
    const F& fld = *field_;
    const std::size_t n = n_;
    std::copy(f_.begin(), f_.end(), ga_.begin());
    std::size_t la = n + 1;
    std::copy(h_.begin(), h_.end(), gb_.begin());
    gb_[1] = fld.sub(gb_[1], 1);
    std::size_t lb = n;
    while (lb > 0 && gb_[lb - 1] == 0) --lb;
    Elem* a = ga_.data();
    Elem* b = gb_.data();
    while (lb > 0) {
      // a <- a mod b
      const Elem inv_lead = fld.inv(b[lb - 1]);
      while (la >= lb) {
        const Elem c = fld.mul(a[la - 1], inv_lead);
        const std::size_t shift = la - lb;
        for (std::size_t j = 0; j < lb; ++j) a[shift + j] = fld.sub(a[shift + j], fld.mul(c, b[j]));
        while (la > 0 && a[la - 1] == 0) --la;
        if (la == 0) break;
      }
      std::swap(a, b);
      std::swap(la, lb);
    }
    return la == 1;
  }

  const F* field_;
  std::size_t n_;
  unsigned qbits_ = 0;
  std::vector<unsigned> ells_;
  std::vector<Elem> f_, prod_, x_, h_, tmp_, cols_, ga_, gb_;
};

/// Streams the monic degree-n polynomials whose rank (coefficients of
/// t^0..t^{n-1} read as base-q digits, t^0 least significant) is congruent to
/// index mod total, in increasing rank order.
template <FiniteField F>
class MonicEnumerator {
 public:
  MonicEnumerator(const F& field, std::size_t n, u64 index, u64 total, u128 start_rank = 0)
      : q_(field.order()), n_(n), total_(total) {
    if (total < 1 || index >= total) throw ValidationError("invalid shard");
    if (n < 1) throw ValidationError("enumeration degree must be >= 1");
    space_ = checked_pow(q_, static_cast<unsigned>(n));
    // First rank >= start_rank in this residue class.
    u128 first = start_rank;
    const u128 rem = first % total;
    if (rem != index) first += (index + total - rem) % total;
    rank_ = first;
    coeffs_.assign(n + 1, 0);
    coeffs_[n] = 1;
    u128 r = first;
    for (std::size_t i = 0; i < n; ++i) {
      coeffs_[i] = static_cast<Elem>(r % q_);
      r /= q_;
    }
    done_ = first >= space_;
  }

  bool done() const noexcept { return done_; }
  u128 rank() const noexcept { return rank_; }
  u128 space() const noexcept { return space_; }
  /// Current polynomial as n + 1 coefficients (monic).
  std::span<const Elem> coeffs() const noexcept { return coeffs_; }

  void advance() {
    rank_ += total_;
    if (rank_ >= space_) {
      done_ = true;
      return;
    }
    u64 carry = total_;
    for (std::size_t i = 0; i < n_ && carry != 0; ++i) {
      const u128 s = static_cast<u128>(coeffs_[i]) + carry;
      coeffs_[i] = static_cast<Elem>(s % q_);
      carry = static_cast<u64>(s / q_);
    }
  }

 private:
  u64 q_;
  std::size_t n_;
  u64 total_;
  u128 space_ = 0;
  u128 rank_ = 0;
  bool done_ = false;
  std::vector<Elem> coeffs_;
};

/// Materialised shard of the monic degree-n polynomials (small spaces only).
template <FiniteField F>
std::vector<Poly> enumerate_monic(const F& field, std::size_t n, u64 index = 0, u64 total = 1) {
  std::vector<Poly> out;
  for (MonicEnumerator<F> it(field, n, index, total); !it.done(); it.advance()) {
    out.emplace_back(std::vector<Elem>(it.coeffs().begin(), it.coeffs().end()));
  }
  return out;
}

}  // namespace fqhl

#endif  // FQHL_FQPOLY_HPP
