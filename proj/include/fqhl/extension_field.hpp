#ifndef FQHL_EXTENSION_FIELD_HPP
#define FQHL_EXTENSION_FIELD_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "fqhl/common.hpp"
#include "fqhl/fqpoly.hpp"
#include "fqhl/poly.hpp"
#include "fqhl/prime_field.hpp"

namespace fqhl {

/// Fields up to this size get exp/log/Zech tables; larger ones multiply
/// coefficient vectors directly.
inline constexpr u64 kExtensionTableLimit = u64{1} << 20;

/// The lexicographically least monic irreducible polynomial of degree k over F_p,
/// ordering (c_{k-1}, ..., c_0) as a base-p integer. Not Conway-compatible.
inline Poly least_irreducible(const PrimeField& fp, unsigned k) {
  const u64 p = fp.characteristic();
  const u128 count = checked_pow(p, k);
  std::vector<Elem> c(k + 1, 0);
  c[k] = 1;
  for (u128 v = 0; v < count; ++v) {
    u128 r = v;
    for (unsigned i = 0; i < k; ++i) {
      c[i] = static_cast<Elem>(r % p);
      r /= p;
    }
    Poly f(c);
    if (is_irreducible(fp, f)) return f;
  }
  throw Error("no irreducible polynomial found");  // unreachable for prime p
}

/// F_{p^k}, k >= 2, as F_p[t]/(modulus). Element a encodes the coefficient
/// vector (c_0, ..., c_{k-1}) as sum c_i p^i.
class ExtensionField {
 public:
  ExtensionField(u32 p, unsigned k) : impl_(lookup(p, k)) {}

  u32 characteristic() const noexcept { return impl_->base.characteristic(); }
  unsigned degree() const noexcept { return impl_->k; }
  u64 order() const noexcept { return impl_->q; }
  std::string label() const { return std::to_string(characteristic()) + "^" + std::to_string(degree()); }
  const Poly& modulus() const noexcept { return impl_->modulus; }
  bool has_tables() const noexcept { return !impl_->exp.empty(); }

  bool is_valid(Elem a) const noexcept { return a < impl_->q; }

  Elem add(Elem a, Elem b) const noexcept {
    const Impl& m = *impl_;
    if (a == 0) return b;
    if (b == 0) return a;
    if (!m.exp.empty()) {
      const u32 la = m.log[a];
      u32 d = m.log[b] + (m.q - 1) - la;
      if (d >= m.q - 1) d -= static_cast<u32>(m.q - 1);
      const u32 z = m.zech[d];
      return z == kNoLog ? 0 : m.exp[la + z];
    }
    return digitwise(a, b, false);
  }
  Elem sub(Elem a, Elem b) const noexcept { return add(a, neg(b)); }
  Elem neg(Elem a) const noexcept {
    const Impl& m = *impl_;
    if (a == 0) return 0;
    if (!m.exp.empty()) {
      // -1 = g^{(q-1)/2} for odd q; -a = a in characteristic 2.
      if (m.base.characteristic() == 2) return a;
      u32 l = m.log[a] + static_cast<u32>((m.q - 1) / 2);
      return m.exp[l];
    }
    return digitwise(0, a, true);
  }
  Elem mul(Elem a, Elem b) const noexcept {
    const Impl& m = *impl_;
    if (a == 0 || b == 0) return 0;
    if (!m.exp.empty()) return m.exp[m.log[a] + m.log[b]];
    return slow_mul(m, a, b);
  }
  Elem inv(Elem a) const {
    if (a == 0) throw ValidationError("inverse of zero");
    const Impl& m = *impl_;
    if (!m.exp.empty()) return m.exp[(m.q - 1 - m.log[a]) % (m.q - 1)];
    return field_pow(*this, a, m.q - 2);
  }
  Elem from_int(std::int64_t v) const noexcept { return impl_->base.from_int(v); }

  void digits(Elem a, Elem* out) const noexcept {
    const u32 p = characteristic();
    for (unsigned i = 0; i < impl_->k; ++i) {
      out[i] = a % p;
      a /= p;
    }
  }
  Elem from_digits(const Elem* in) const noexcept {
    const u32 p = characteristic();
    Elem a = 0;
    for (unsigned i = impl_->k; i-- > 0;) a = a * p + in[i];
    return a;
  }

  bool operator==(const ExtensionField& o) const noexcept { return impl_ == o.impl_; }

 private:
  static constexpr u32 kNoLog = 0xffffffffu;

  struct Impl {
    PrimeField base;
    unsigned k;
    u64 q;
    Poly modulus;
    std::vector<u32> exp;   // 2(q-1) entries, exp[i] = g^i
    std::vector<u32> log;   // q entries, log[0] unused
    std::vector<u32> zech;  // q-1 entries, log(1 + g^d) or kNoLog
  };

  Elem digitwise(Elem a, Elem b, bool negate_b) const noexcept {
    const u32 p = characteristic();
    Elem out = 0, scale = 1;
    for (unsigned i = 0; i < impl_->k; ++i) {
      u32 da = a % p, db = b % p;
      a /= p;
      b /= p;
      u32 s = negate_b ? (da + p - db) % p : (da + db) % p;
      out += s * scale;
      scale *= p;
    }
    return out;
  }

  static Elem slow_mul(const Impl& m, Elem a, Elem b) {
    const u32 p = m.base.characteristic();
    const unsigned k = m.k;
    std::vector<Elem> da(k), db(k), prod(2 * k - 1, 0);
    for (unsigned i = 0; i < k; ++i) {
      da[i] = a % p;
      a /= p;
      db[i] = b % p;
      b /= p;
    }
    for (unsigned i = 0; i < k; ++i) {
      if (da[i] == 0) continue;
      for (unsigned j = 0; j < k; ++j) prod[i + j] = m.base.add(prod[i + j], m.base.mul(da[i], db[j]));
    }
    for (unsigned i = 2 * k - 1; i-- > k;) {
      const Elem c = prod[i];
      if (c == 0) continue;
      for (unsigned j = 0; j < k; ++j) prod[i - k + j] = m.base.sub(prod[i - k + j], m.base.mul(c, m.modulus[j]));
    }
    Elem out = 0;
    for (unsigned i = k; i-- > 0;) out = out * p + prod[i];
    return out;
  }

  static std::shared_ptr<const Impl> build(u32 p, unsigned k) {
    auto impl = std::make_shared<Impl>(Impl{PrimeField(p), k, 0, {}, {}, {}, {}});
    const u128 q = checked_pow(p, k);
    if (q > kMaxFieldOrder) throw ValidationError("field order " + to_string(q) + " exceeds 2^31");
    impl->q = static_cast<u64>(q);
    impl->modulus = least_irreducible(impl->base, k);
    if (impl->q <= kExtensionTableLimit) build_tables(*impl);
    return impl;
  }

  static void build_tables(Impl& m) {
    const u64 q = m.q;
    const auto factors = prime_factors(q - 1);
    auto slow_pow = [&](Elem x, u64 e) {
      Elem r = 1;
      while (e != 0) {
        if (e & 1) r = slow_mul(m, r, x);
        e >>= 1;
        if (e != 0) x = slow_mul(m, x, x);
      }
      return r;
    };
    Elem g = 0;
    for (Elem cand = 2; cand < q; ++cand) {
      bool primitive = true;
      for (u64 ell : factors) {
        if (slow_pow(cand, (q - 1) / ell) == 1) {
          primitive = false;
          break;
        }
      }
      if (primitive) {
        g = cand;
        break;
      }
    }
    if (g == 0) throw Error("no primitive element found");
    m.exp.assign(2 * (q - 1), 0);
    m.log.assign(q, kNoLog);
    Elem x = 1;
    for (u64 i = 0; i < q - 1; ++i) {
      m.exp[i] = x;
      m.exp[i + q - 1] = x;
      m.log[x] = static_cast<u32>(i);
      x = slow_mul(m, x, g);
    }
    // zech[d] = log(1 + g^d); addition of 1 touches only the constant digit.
    const u32 p = m.base.characteristic();
    m.zech.assign(q - 1, kNoLog);
    for (u64 d = 0; d < q - 1; ++d) {
      Elem e = m.exp[d];
      const Elem c0 = e % p;
      const Elem sum = e - c0 + (c0 + 1) % p;
      m.zech[d] = sum == 0 ? kNoLog : m.log[sum];
    }
  }

  static std::shared_ptr<const Impl> lookup(u32 p, unsigned k) {
    if (k < 2) throw ValidationError("extension degree must be >= 2");
    static std::mutex mu;
    static std::map<std::pair<u32, unsigned>, std::shared_ptr<const Impl>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({p, k});
    if (it != cache.end()) return it->second;
    auto impl = build(p, k);
    cache.emplace(std::make_pair(p, k), impl);
    return impl;
  }

  std::shared_ptr<const Impl> impl_;
};

}  // namespace fqhl

#endif  // FQHL_EXTENSION_FIELD_HPP
