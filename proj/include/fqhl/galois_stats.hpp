#ifndef FQHL_GALOIS_STATS_HPP
#define FQHL_GALOIS_STATS_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "fqhl/common.hpp"
#include "fqhl/field.hpp"
#include "fqhl/fqpoly.hpp"
#include "fqhl/hlcount.hpp"
#include "fqhl/random.hpp"

namespace fqhl {

/// A partition of n, parts ascending. For a square-free polynomial this is the
/// cycle type of Frobenius acting on its roots.
struct CycleType {
  std::vector<unsigned> parts;

  CycleType() = default;
  explicit CycleType(std::vector<unsigned> p) : parts(std::move(p)) { std::sort(parts.begin(), parts.end()); }

  unsigned size() const noexcept { return std::accumulate(parts.begin(), parts.end(), 0u); }
  bool valid() const noexcept {
    return !parts.empty() && std::none_of(parts.begin(), parts.end(), [](unsigned x) { return x == 0; });
  }
  /// "1+2" style label.
  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) s += '+';
      s += std::to_string(parts[i]);
    }
    return s;
  }
  friend auto operator<=>(const CycleType&, const CycleType&) = default;
};

/// Joint cycle types of (f + a_1, ..., f + a_r), joined with '|'.
using CycleTuple = std::vector<CycleType>;

inline std::string tuple_label(const CycleTuple& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += '|';
    s += t[i].str();
  }
  return s;
}

/// All partitions of n in lexicographic order of their ascending part lists.
inline std::vector<CycleType> partitions_of(unsigned n) {
  std::vector<CycleType> out;
  std::vector<unsigned> cur;
  auto rec = [&](auto&& self, unsigned remaining, unsigned min_part) -> void {
    if (remaining == 0) {
      out.emplace_back(cur);
      return;
    }
    for (unsigned p = min_part; p <= remaining; ++p) {
      cur.push_back(p);
      self(self, remaining - p, p);
      cur.pop_back();
    }
  };
  rec(rec, n, 1);
  return out;
}

/// Probability that a uniform permutation of S_n has cycle type lambda:
/// 1 / prod_j (j^{m_j} m_j!).
inline Rational sn_class_probability(const CycleType& lambda) {
  if (!lambda.valid()) throw ValidationError("invalid partition");
  if (lambda.size() > 30) throw ValidationError("partition too large for exact probability");
  std::map<unsigned, unsigned> mult;
  for (unsigned p : lambda.parts) ++mult[p];
  u128 den = 1;
  for (auto [part, m] : mult) {
    for (unsigned i = 0; i < m; ++i) den *= part;
    for (unsigned i = 2; i <= m; ++i) den *= i;
  }
  return Rational::make(1, den);
}

/// Empirical distribution of joint cycle types against the S_n^r reference.
struct JointCycleStats {
  unsigned n = 0;
  unsigned r = 0;
  std::map<CycleTuple, u64> counts;
  u64 total = 0;
  u64 discarded = 0;  // draws with some f + a_i not square-free
  std::map<CycleType, Rational> reference;

  JointCycleStats() = default;
  JointCycleStats(unsigned n_, unsigned r_) : n(n_), r(r_) {
    for (const auto& lam : partitions_of(n)) reference.emplace(lam, sn_class_probability(lam));
  }

  void add(const CycleTuple& t, u64 times = 1) {
    counts[t] += times;
    total += times;
  }

  /// Pointwise sum; both sides must describe the same (n, r).
  void merge(const JointCycleStats& o) {
    if (o.n != n || o.r != r) throw ValidationError("cannot merge cycle statistics of different shape");
    for (const auto& [k, v] : o.counts) counts[k] += v;
    total += o.total;
    discarded += o.discarded;
  }

  /// Count of coordinate `coord` having cycle type lam.
  u64 marginal(std::size_t coord, const CycleType& lam) const {
    u64 s = 0;
    for (const auto& [k, v] : counts) {
      if (k[coord] == lam) s += v;
    }
    return s;
  }

  u64 count(const CycleTuple& t) const {
    auto it = counts.find(t);
    return it == counts.end() ? 0 : it->second;
  }
};

/// Draws `samples` uniform monic degree-n f (counter stream (seed, i), shared with
/// pi_sample) and records the cycle types of f + a_1, ..., f + a_r. Draws where
/// some f + a_i has a repeated factor are discarded and tallied separately.
inline JointCycleStats joint_cycle_sample(const TupleSpec& spec, u64 samples, u64 seed, ShardId shard = {}) {
  require_valid(spec);
  JointCycleStats stats(static_cast<unsigned>(spec.n), static_cast<unsigned>(spec.r()));
  spec.field.visit([&](const auto& fld) {
    std::vector<Elem> f(spec.n + 1);
    CycleTuple tuple(spec.r());
    for (u64 i = shard.index; i < samples; i += shard.total) {
      draw_monic(fld.order(), spec.n, seed, i, f);
      const Poly base(f);
      bool keep = true;
      for (std::size_t j = 0; j < spec.r() && keep; ++j) {
        const Poly g = poly_add(fld, base, spec.offsets[j]);
        if (!is_squarefree(fld, g)) {
          keep = false;
          break;
        }
        tuple[j] = CycleType(factor_degrees(fld, g));
      }
      if (keep) {
        stats.add(tuple);
      } else {
        ++stats.discarded;
      }
    }
  });
  return stats;
}

/// Synthetic statistics from r independent uniform permutations per sample.
inline JointCycleStats sample_product_model(unsigned n, unsigned r, u64 samples, u64 seed) {
  JointCycleStats stats(n, r);
  std::vector<unsigned> perm(n);
  std::vector<bool> seen(n);
  CycleTuple tuple(r);
  for (u64 i = 0; i < samples; ++i) {
    CounterStream rng(seed, i);
    for (unsigned c = 0; c < r; ++c) {
      std::iota(perm.begin(), perm.end(), 0u);
      for (unsigned j = n; j > 1; --j) std::swap(perm[j - 1], perm[rng.below(j)]);
      std::fill(seen.begin(), seen.end(), false);
      std::vector<unsigned> parts;
      for (unsigned s = 0; s < n; ++s) {
        if (seen[s]) continue;
        unsigned len = 0;
        for (unsigned x = s; !seen[x]; x = perm[x]) {
          seen[x] = true;
          ++len;
        }
        parts.push_back(len);
      }
      tuple[c] = CycleType(std::move(parts));
    }
    stats.add(tuple);
  }
  return stats;
}

struct ChiSquareResult {
  double statistic = 0;
  unsigned dof = 0;
  double p_value = 1;
  std::size_t buckets = 0;
};

/// Pearson goodness of fit. Cells with expected count below 5 are pooled,
/// smallest first, until the pool itself reaches 5; dof = buckets - 1.
inline ChiSquareResult chi_square_gof(std::vector<std::pair<double, double>> observed_expected) {
  std::sort(observed_expected.begin(), observed_expected.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  std::vector<std::pair<double, double>> buckets;
  double pool_obs = 0, pool_exp = 0;
  std::size_t i = 0;
  while (i < observed_expected.size() &&
         (observed_expected[i].second < 5.0 || (pool_exp > 0 && pool_exp < 5.0))) {
    pool_obs += observed_expected[i].first;
    pool_exp += observed_expected[i].second;
    ++i;
  }
  if (pool_exp > 0) buckets.emplace_back(pool_obs, pool_exp);
  for (; i < observed_expected.size(); ++i) buckets.push_back(observed_expected[i]);
  ChiSquareResult res;
  res.buckets = buckets.size();
  for (const auto& [o, e] : buckets) {
    if (e > 0) res.statistic += (o - e) * (o - e) / e;
  }
  res.dof = buckets.size() > 1 ? static_cast<unsigned>(buckets.size() - 1) : 0;
  res.p_value = res.dof == 0 ? 1.0 : boost::math::gamma_q(res.dof / 2.0, res.statistic / 2.0);
  return res;
}

struct IndependenceReport {
  ChiSquareResult joint;
  std::vector<ChiSquareResult> marginals;

  bool rejects(double alpha) const noexcept { return joint.p_value < alpha; }
};

/// Joint goodness of fit against the product of exact S_n class probabilities,
/// plus one marginal goodness-of-fit test per coordinate.
inline IndependenceReport independence_test(const JointCycleStats& stats) {
  const auto parts = partitions_of(stats.n);
  u128 cells = 1;
  for (unsigned i = 0; i < stats.r; ++i) cells *= parts.size();
  if (static_cast<u128>(stats.total) < 50 * cells) {
    throw ValidationError("independence test needs at least " + to_string(50 * cells) + " samples, have " +
                          std::to_string(stats.total));
  }
  const double total = static_cast<double>(stats.total);
  IndependenceReport rep;

  std::vector<std::pair<double, double>> joint;
  std::vector<std::size_t> idx(stats.r, 0);
  for (u128 c = 0; c < cells; ++c) {
    CycleTuple t(stats.r);
    long double prob = 1;
    for (unsigned j = 0; j < stats.r; ++j) {
      t[j] = parts[idx[j]];
      prob *= stats.reference.at(t[j]).value();
    }
    joint.emplace_back(static_cast<double>(stats.count(t)), static_cast<double>(prob * total));
    for (unsigned j = 0; j < stats.r; ++j) {
      if (++idx[j] < parts.size()) break;
      idx[j] = 0;
    }
  }
  rep.joint = chi_square_gof(std::move(joint));

  for (unsigned j = 0; j < stats.r; ++j) {
    std::vector<std::pair<double, double>> marg;
    for (const auto& lam : parts) {
      marg.emplace_back(static_cast<double>(stats.marginal(j, lam)),
                        static_cast<double>(stats.reference.at(lam).value() * total));
    }
    rep.marginals.push_back(chi_square_gof(std::move(marg)));
  }
  return rep;
}

/// chi(disc f) == (-1)^{n - m} for monic square-free f with m irreducible factors.
template <FiniteField F>
bool stickelberger_check(const F& field, const Poly& f_in) {
  if (field.characteristic() == 2) throw ValidationError("Stickelberger parity needs odd q");
  const Poly f = poly_monic(field, f_in);
  if (!is_squarefree(field, f)) throw ValidationError("Stickelberger parity needs a square-free polynomial");
  const std::size_t n = f.deg();
  const std::size_t m = factor_degrees(field, f).size();
  const int expected = (n - m) % 2 == 0 ? 1 : -1;
  return quadratic_character(field, discriminant(field, f)) == expected;
}

}  // namespace fqhl

#endif  // FQHL_GALOIS_STATS_HPP
