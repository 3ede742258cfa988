#ifndef FQHL_HLCOUNT_HPP
#define FQHL_HLCOUNT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fqhl/bipoly.hpp"
#include "fqhl/common.hpp"
#include "fqhl/field.hpp"
#include "fqhl/fqpoly.hpp"
#include "fqhl/poly.hpp"
#include "fqhl/poly_text.hpp"
#include "fqhl/random.hpp"

namespace fqhl {

/// Default cap on tuple tests (or u-tuples) a single count may perform.
inline constexpr u64 kDefaultBudget = 100'000'000;

/// Input of a tuple count: the field, the degree n of f and the offsets a_1..a_r.
struct TupleSpec {
  Field field;
  std::size_t n = 0;
  std::vector<Poly> offsets;
  /// Even q is outside the odd-q hypothesis; counting is still allowed when set.
  bool allow_even_q = false;

  std::size_t r() const noexcept { return offsets.size(); }
  bool outside_hypotheses() const { return field.characteristic() == 2; }
};

/// Parses "p" / "p^k" plus a comma-separated offset list.
inline TupleSpec make_tuple_spec(std::string_view field, std::size_t n, std::string_view offsets,
                                 bool allow_even_q = false) {
  TupleSpec spec{parse_field(field), n, {}, allow_even_q};
  for (const auto& text : split_poly_list(offsets)) spec.offsets.push_back(poly_parse(spec.field, text));
  return spec;
}

/// Every violated TupleSpec invariant; empty when the spec is valid.
inline std::vector<std::string> validate_tuple(const TupleSpec& spec) {
  std::vector<std::string> violations;
  if (spec.field.characteristic() == 2 && !spec.allow_even_q) {
    violations.push_back("even q=" + std::to_string(spec.field.order()) +
                         ": the count requires an odd prime power (use the even-q override)");
  }
  if (spec.n < 1) violations.push_back("n must be >= 1");
  if (spec.offsets.empty()) violations.push_back("need at least one offset (r >= 1)");
  for (std::size_t i = 0; i < spec.offsets.size(); ++i) {
    const Poly& a = spec.offsets[i];
    for (Elem c : a.coeffs()) {
      if (!spec.field.is_valid(c)) {
        violations.push_back("offset " + std::to_string(i + 1) + " has a coefficient outside the field");
        break;
      }
    }
    if (!a.is_zero() && a.deg() >= spec.n) {
      violations.push_back("offset " + std::to_string(i + 1) + " has degree " + std::to_string(a.deg()) +
                           " >= n=" + std::to_string(spec.n));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (spec.offsets[j] == a) {
        violations.push_back("duplicate offsets at positions " + std::to_string(j + 1) + " and " +
                             std::to_string(i + 1));
      }
    }
  }
  return violations;
}

inline void require_valid(const TupleSpec& spec) {
  const auto v = validate_tuple(spec);
  if (v.empty()) return;
  std::string msg = "invalid tuple spec:";
  for (const auto& s : v) msg += " " + s + ";";
  throw ValidationError(msg);
}

/// Offsets in canonical text form, in the order given.
inline std::vector<std::string> offset_texts(const TupleSpec& spec) {
  std::vector<std::string> out;
  for (const auto& a : spec.offsets) out.push_back(poly_format(spec.field, a));
  return out;
}

/// Nonnegative rational with 128-bit parts, kept in lowest terms.
struct Rational {
  u128 num = 0;
  u128 den = 1;

  static Rational make(u128 num, u128 den) {
    const u128 g = gcd128(num, den);
    return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
  }
  long double value() const noexcept { return static_cast<long double>(num) / static_cast<long double>(den); }
  std::string str() const { return to_string(num) + "/" + to_string(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// q^n / n^r.
inline Rational prediction(u64 q, std::size_t n, std::size_t r) {
  return Rational::make(checked_pow(q, static_cast<unsigned>(n)), checked_pow(n, static_cast<unsigned>(r)));
}

struct ShardId {
  u64 index = 0;
  u64 total = 1;
  friend bool operator==(const ShardId&, const ShardId&) = default;
};

enum class CountMode { kExact, kSampled };

inline const char* to_string(CountMode m) { return m == CountMode::kExact ? "exact" : "sampled"; }

/// One tuple count together with the main-term prediction and its error.
struct CountResult {
  std::string field;
  std::size_t n = 0;
  std::vector<std::string> offsets;
  CountMode mode = CountMode::kExact;
  u128 hits = 0;                // polynomials passing (exact) or successful draws (sampled)
  u128 tested = 0;              // polynomials enumerated or draws made
  double pi = 0;                // pi itself (exact) or q^n * hits / samples (sampled)
  Rational prediction;          // q^n / n^r
  double abs_error = 0;
  double normalized_error = 0;  // abs_error / q^{n - 1/2}
  std::optional<u64> sample_size;
  std::optional<double> ci_half_width;
  std::optional<u64> seed;
  ShardId shard;
  std::string config_digest;
  bool outside_hypotheses = false;

  /// Exact pi as an integer (exact mode only).
  u128 pi_exact() const noexcept { return hits; }
};

namespace detail {

inline u64 fnv1a64(std::string_view s) {
  u64 h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(u64 v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace detail

/// Stable hex digest of a canonical JSON document (keys sorted).
inline std::string stable_digest(const nlohmann::json& canonical) {
  return detail::hex64(detail::fnv1a64(canonical.dump()));
}

/// Canonical serialized form of a spec plus run parameters that change results.
inline nlohmann::json canonical_spec(const TupleSpec& spec, CountMode mode, std::optional<u64> samples = {},
                                     std::optional<u64> seed = {}) {
  nlohmann::json j;
  j["field"] = spec.field.label();
  j["n"] = spec.n;
  j["offsets"] = offset_texts(spec);
  j["allow_even_q"] = spec.allow_even_q;
  j["mode"] = to_string(mode);
  if (samples) j["samples"] = *samples;
  if (seed) j["seed"] = *seed;
  return j;
}

namespace detail {

/// Offsets reordered for the short-circuit: ascending degree, then coefficients.
inline std::vector<Poly> test_order(const TupleSpec& spec) {
  std::vector<Poly> out = spec.offsets;
  std::sort(out.begin(), out.end());
  return out;
}

/// Tests every f + a_i for irreducibility, stopping at the first failure.
template <FiniteField F>
class TupleTester {
 public:
  TupleTester(const F& field, const TupleSpec& spec)
      : field_(&field), tester_(field, spec.n), offsets_(test_order(spec)), g_(spec.n + 1) {}

  bool operator()(std::span<const Elem> f) {
    for (const Poly& a : offsets_) {
      std::copy(f.begin(), f.end(), g_.begin());
      for (std::size_t j = 0; j < a.size(); ++j) g_[j] = field_->add(g_[j], a[j]);
      if (!tester_(g_)) return false;
    }
    return true;
  }

 private:
  const F* field_;
  RabinTester<F> tester_;
  std::vector<Poly> offsets_;
  std::vector<Elem> g_;
};

inline void fill_errors(CountResult& r, u64 q, std::size_t n, long double pi_value) {
  const long double pred = r.prediction.value();
  r.abs_error = static_cast<double>(std::fabs(pi_value - pred));
  const long double scale = std::pow(static_cast<long double>(q), static_cast<long double>(n) - 0.5L);
  r.normalized_error = static_cast<double>(static_cast<long double>(r.abs_error) / scale);
}

}  // namespace detail

/// Partial exact count over one slice of a shard: ranks start_rank, start_rank +
/// total, ... up to max_items of them.
struct RangeCount {
  u128 hits = 0;
  u128 tested = 0;
  u128 next_rank = 0;  // first rank of this shard not yet processed
  bool done = false;
};

inline RangeCount count_exact_range(const TupleSpec& spec, ShardId shard, u128 start_rank, u64 max_items) {
  return spec.field.visit([&](const auto& fld) {
    using F = std::decay_t<decltype(fld)>;
    detail::TupleTester<F> tuple(fld, spec);
    RangeCount out;
    MonicEnumerator<F> it(fld, spec.n, shard.index, shard.total, start_rank);
    for (; !it.done() && out.tested < max_items; it.advance()) {
      ++out.tested;
      if (tuple(it.coeffs())) ++out.hits;
    }
    out.done = it.done();
    out.next_rank = it.done() ? it.space() : it.rank();
    return out;
  });
}

/// Assembles a CountResult from an exact hit count.
inline CountResult exact_result(const TupleSpec& spec, u128 hits, u128 tested, ShardId shard) {
  CountResult r;
  const u64 q = spec.field.order();
  r.field = spec.field.label();
  r.n = spec.n;
  r.offsets = offset_texts(spec);
  r.mode = CountMode::kExact;
  r.hits = hits;
  r.tested = tested;
  r.pi = static_cast<double>(hits);
  r.prediction = prediction(q, spec.n, spec.r());
  // |pi - q^n/n^r| = |pi n^r - q^n| / n^r, exact up to the final division.
  const u128 nr = checked_pow(spec.n, static_cast<unsigned>(spec.r()));
  const u128 qn = checked_pow(q, static_cast<unsigned>(spec.n));
  const u128 scaled = hits * nr;
  const u128 diff = scaled > qn ? scaled - qn : qn - scaled;
  r.abs_error = static_cast<double>(static_cast<long double>(diff) / static_cast<long double>(nr));
  r.normalized_error = static_cast<double>(
      static_cast<long double>(r.abs_error) /
      std::pow(static_cast<long double>(q), static_cast<long double>(spec.n) - 0.5L));
  r.shard = shard;
  r.config_digest = stable_digest(canonical_spec(spec, CountMode::kExact));
  r.outside_hypotheses = spec.outside_hypotheses();
  return r;
}

/// pi(q, n; a): monic degree-n f with every f + a_i irreducible, over one shard.
inline CountResult pi_exact(const TupleSpec& spec, ShardId shard = {}, u64 budget = kDefaultBudget) {
  require_valid(spec);
  if (shard.total < 1 || shard.index >= shard.total) throw ValidationError("invalid shard");
  const u128 space = checked_pow(spec.field.order(), static_cast<unsigned>(spec.n));
  const u128 work = (space + shard.total - 1 - shard.index) / shard.total;
  if (work > budget) {
    throw BudgetError("exact count needs " + to_string(work) + " tuple tests, budget is " + std::to_string(budget));
  }
  const RangeCount rc = count_exact_range(spec, shard, 0, static_cast<u64>(work));
  return exact_result(spec, rc.hits, rc.tested, shard);
}

/// Coefficients (t^0..t^{n-1}) of the draw-th uniform monic polynomial of a seed.
inline void draw_monic(u64 q, std::size_t n, u64 seed, u64 draw, std::span<Elem> coeffs) {
  CounterStream rng(seed, draw);
  for (std::size_t j = 0; j < n; ++j) coeffs[j] = static_cast<Elem>(rng.below(q));
  coeffs[n] = 1;
}

/// Hits among the draws of one shard (draw indices congruent to shard.index).
inline u64 sample_hits(const TupleSpec& spec, u64 samples, u64 seed, ShardId shard) {
  return spec.field.visit([&](const auto& fld) {
    using F = std::decay_t<decltype(fld)>;
    detail::TupleTester<F> tuple(fld, spec);
    std::vector<Elem> f(spec.n + 1);
    u64 hits = 0;
    for (u64 i = shard.index; i < samples; i += shard.total) {
      draw_monic(fld.order(), spec.n, seed, i, f);
      if (tuple(f)) ++hits;
    }
    return hits;
  });
}

/// Estimate from a hit count: q^n * hits / samples with a normal-approximation
/// 95% half-width.
inline CountResult sampled_result(const TupleSpec& spec, u64 hits, u64 samples, u64 seed) {
  CountResult r;
  const u64 q = spec.field.order();
  r.field = spec.field.label();
  r.n = spec.n;
  r.offsets = offset_texts(spec);
  r.mode = CountMode::kSampled;
  r.hits = hits;
  r.tested = samples;
  r.prediction = prediction(q, spec.n, spec.r());
  const long double qn = std::pow(static_cast<long double>(q), static_cast<long double>(spec.n));
  const long double frac = static_cast<long double>(hits) / static_cast<long double>(samples);
  const long double estimate = qn * frac;
  r.pi = static_cast<double>(estimate);
  detail::fill_errors(r, q, spec.n, estimate);
  r.sample_size = samples;
  r.ci_half_width = static_cast<double>(1.96L * qn * std::sqrt(frac * (1 - frac) / samples));
  r.seed = seed;
  r.config_digest = stable_digest(canonical_spec(spec, CountMode::kSampled, samples, seed));
  r.outside_hypotheses = spec.outside_hypotheses();
  return r;
}

/// Monte Carlo estimate of pi from `samples` i.i.d. uniform monic polynomials;
/// draw i is generated from the counter stream (seed, i). With enumerate set,
/// samples must equal q^n and every polynomial is visited once instead.
inline CountResult pi_sample(const TupleSpec& spec, u64 samples, u64 seed, bool enumerate = false) {
  require_valid(spec);
  if (samples < 1) throw ValidationError("samples must be >= 1");
  if (enumerate) {
    const u128 space = checked_pow(spec.field.order(), static_cast<unsigned>(spec.n));
    if (space != samples) throw ValidationError("enumeration mode requires samples == q^n");
    const RangeCount rc = count_exact_range(spec, {}, 0, samples);
    CountResult r = sampled_result(spec, static_cast<u64>(rc.hits), samples, seed);
    r.ci_half_width = 0.0;
    return r;
  }
  return sampled_result(spec, sample_hits(spec, samples, seed, {}), samples, seed);
}

/// Carmon-Rudnick tally over (u_1, ..., u_{n-1}) in F_q^{n-1}.
struct CRReport {
  u128 count = 0;   // N: tuples meeting all three conditions
  u128 space = 0;   // q^{n-1}
  double density = 0;
  u128 not_squarefree = 0;
  u128 not_coprime = 0;
  u128 constant = 0;
};

namespace detail {

enum class CRFailure { kNone, kNotSquarefree, kNotCoprime, kConstant };

/// Classifies one discriminant tuple, charging the first failing condition in
/// the order square-free, coprime, non-constant.
template <FiniteField F>
CRFailure classify_discriminants(const F& field, const std::vector<Poly>& discs) {
  for (const Poly& d : discs) {
    if (d.is_zero() || !is_squarefree(field, d)) return CRFailure::kNotSquarefree;
  }
  for (std::size_t i = 0; i < discs.size(); ++i) {
    for (std::size_t j = i + 1; j < discs.size(); ++j) {
      if (poly_gcd(field, discs[i], discs[j]).deg() != 0) return CRFailure::kNotCoprime;
    }
  }
  for (const Poly& d : discs) {
    if (d.deg() == 0) return CRFailure::kConstant;
  }
  return CRFailure::kNone;
}

}  // namespace detail

/// Counts u in F_q^{n-1} for which the discriminants in t of
/// t^n + u_1 t^{n-1} + ... + u_{n-1} t + U + a_i are square-free, pairwise
/// coprime and non-constant as polynomials in U.
inline CRReport cr_count_exact(const TupleSpec& spec, u64 budget = kDefaultBudget) {
  require_valid(spec);
  if (spec.n < 2) throw ValidationError("cr_count_exact requires n >= 2");
  const u64 q = spec.field.order();
  CRReport rep;
  rep.space = checked_pow(q, static_cast<unsigned>(spec.n - 1));
  if (rep.space > budget) {
    throw BudgetError("Carmon-Rudnick count needs " + to_string(rep.space) + " tuples, budget is " +
                      std::to_string(budget));
  }
  spec.field.visit([&](const auto& fld) {
    std::vector<Elem> u(spec.n - 1, 0);
    std::vector<Poly> discs(spec.r());
    for (u128 idx = 0; idx < rep.space; ++idx) {
      // u_{n-1} is the least significant digit.
      u128 rem = idx;
      for (std::size_t i = u.size(); i-- > 0;) {
        u[i] = static_cast<Elem>(rem % q);
        rem /= q;
      }
      for (std::size_t i = 0; i < spec.r(); ++i) {
        discs[i] = disc_in_t(fld, specialize_family(fld, std::span<const Elem>(u), spec.offsets[i], spec.n));
      }
      switch (detail::classify_discriminants(fld, discs)) {
        case detail::CRFailure::kNone: ++rep.count; break;
        case detail::CRFailure::kNotSquarefree: ++rep.not_squarefree; break;
        case detail::CRFailure::kNotCoprime: ++rep.not_coprime; break;
        case detail::CRFailure::kConstant: ++rep.constant; break;
      }
    }
  });
  rep.density = static_cast<double>(static_cast<long double>(rep.count) / static_cast<long double>(rep.space));
  return rep;
}

}  // namespace fqhl

#endif  // FQHL_HLCOUNT_HPP
