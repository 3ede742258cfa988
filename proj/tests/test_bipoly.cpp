#include <gtest/gtest.h>

#include "fqhl/fqhl.hpp"
#include "oracles.hpp"

using namespace fqhl;

TEST(SpecializeFamily, Examples) {
  const Field f3 = parse_field("3");
  const std::vector<Elem> zero{0}, one{1};
  const BiPoly a = specialize_family(f3, std::span<const Elem>(zero), Poly{}, 2);
  EXPECT_EQ(a.coeffs_in_t, (std::vector<Poly>{Poly{0, 1}, Poly{}, Poly::constant(1)}));

  const BiPoly b = specialize_family(f3, std::span<const Elem>(one), poly_parse(f3, "t"), 2);
  EXPECT_EQ(b.coeffs_in_t[1], Poly::constant(2));
  EXPECT_EQ(b.coeffs_in_t[0], (Poly{0, 1}));

  EXPECT_THROW(specialize_family(f3, std::span<const Elem>(zero), poly_parse(f3, "t^2"), 2), ValidationError);
  EXPECT_THROW(specialize_family(f3, std::span<const Elem>(std::vector<Elem>{0, 0}), Poly{}, 2), ValidationError);
}

TEST(DiscInT, QuadraticExamples) {
  // t^2 + u t + U -> u^2 - 4U.
  const Field f7 = parse_field("7");
  for (Elem u = 0; u < 7; ++u) {
    const std::vector<Elem> us{u};
    const Poly d = disc_in_t(f7, specialize_family(f7, std::span<const Elem>(us), Poly{}, 2));
    EXPECT_EQ(d, (Poly{f7.mul(u, u), f7.neg(4)})) << "u=" << u;
  }
  const Field f3 = parse_field("3");
  const std::vector<Elem> z{0};
  EXPECT_EQ(disc_in_t(f3, specialize_family(f3, std::span<const Elem>(z), Poly{}, 2)), (Poly{0, 2}));
}

TEST(DiscInT, Errors) {
  const Field f5 = parse_field("5");
  BiPoly linear{{Poly{0, 1}, Poly::constant(1)}};
  EXPECT_THROW(disc_in_t(f5, linear), ValidationError);
  BiPoly non_monic{{Poly{0, 1}, Poly{}, Poly::constant(2)}};
  EXPECT_THROW(disc_in_t(f5, non_monic), ValidationError);
  BiPoly symbolic_lead{{Poly{0, 1}, Poly{}, Poly{1, 1}}};
  EXPECT_THROW(disc_in_t(f5, symbolic_lead), ValidationError);
}

TEST(DiscInT, EvaluationCommutesExhaustively) {
  // Every u in F_q^{n-1}, every offset shape below, every U = c.
  for (const char* label : {"3", "5", "7", "3^2", "11", "13"}) {
    const Field f = parse_field(label);
    const u64 q = f.order();
    for (std::size_t n = 2; n <= 4; ++n) {
      const u64 space = checked_pow(q, static_cast<unsigned>(n - 1));
      if (space * q > 60000) continue;
      const std::vector<Poly> offsets{Poly{}, Poly{1}, Poly{0, 1}};
      for (const Poly& a : offsets) {
        if (!a.is_zero() && a.deg() >= n) continue;
        std::vector<Elem> u(n - 1);
        for (u64 idx = 0; idx < space; ++idx) {
          u64 rem = idx;
          for (auto& x : u) {
            x = static_cast<Elem>(rem % q);
            rem /= q;
          }
          const BiPoly bp = specialize_family(f, std::span<const Elem>(u), a, n);
          const Poly d = disc_in_t(f, bp);
          ASSERT_TRUE(d.is_zero() || d.deg() <= n - 1);
          for (Elem c = 0; c < q; ++c) {
            const Poly spec = evaluate_at_u(f, bp, c);
            ASSERT_EQ(poly_eval(f, d, c), oracle::sylvester_discriminant(f, spec))
                << label << " n=" << n << " c=" << c;
          }
        }
      }
    }
  }
}

TEST(DiscInT, DegreeIsGenericallyNMinusOne) {
  // deg_U disc = n - 1 for most u when p does not divide n.
  for (const char* label : {"5", "7", "11"}) {
    const Field f = parse_field(label);
    for (std::size_t n = 2; n <= 4; ++n) {
      CounterStream rng(99, n);
      int full = 0;
      const int trials = 200;
      for (int i = 0; i < trials; ++i) {
        std::vector<Elem> u(n - 1);
        for (auto& x : u) x = static_cast<Elem>(rng.below(f.order()));
        const Poly d = disc_in_t(f, specialize_family(f, std::span<const Elem>(u), Poly{}, n));
        ASSERT_LE(d.deg(), n - 1);
        full += d.deg() == n - 1;
      }
      // Leading coefficient in U is (+-) n^n, a nonzero constant.
      EXPECT_EQ(full, trials) << label << " n=" << n;
    }
  }
}

TEST(Bareiss, MatchesGaussianEliminationOnConstants) {
  const Field f = parse_field("7");
  CounterStream rng(4, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t size = 1 + rng.below(5);
    std::vector<std::vector<Elem>> m(size, std::vector<Elem>(size));
    std::vector<std::vector<Poly>> mp(size, std::vector<Poly>(size));
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        m[i][j] = static_cast<Elem>(rng.below(3) == 0 ? 0 : rng.below(7));
        mp[i][j] = Poly::constant(m[i][j]);
      }
    }
    const Poly det = bareiss_determinant(f, mp);
    ASSERT_EQ(det.is_zero() ? 0u : det[0], oracle::determinant(f, m));
  }
}
