#include <gtest/gtest.h>

#include "fqhl/fqhl.hpp"
#include "oracles.hpp"

using namespace fqhl;

namespace {

// Odd and even prime fields and extensions with q <= 121.
const char* kSmallFields[] = {"2", "3", "5", "7", "11", "13", "2^2", "2^3", "2^4", "3^2", "3^3", "5^2", "7^2", "3^4", "11^2"};

}  // namespace

TEST(FieldMake, PrimeFieldHasNoModulus) {
  const Field f = field_make(3, 1);
  EXPECT_EQ(f.order(), 3u);
  EXPECT_EQ(f.degree(), 1u);
  EXPECT_EQ(f.label(), "3");
}

TEST(FieldMake, ExtensionModulusIsLexLeastIrreducible) {
  // Oracle: first monic quadratic in (c1, c0) order without a root in F_3.
  const PrimeField f3(3);
  Poly expected;
  for (Elem c1 = 0; c1 < 3 && expected.is_zero(); ++c1) {
    for (Elem c0 = 0; c0 < 3; ++c0) {
      const Poly cand{c0, c1, 1};
      bool has_root = false;
      for (Elem x = 0; x < 3; ++x) has_root = has_root || poly_eval(f3, cand, x) == 0;
      if (!has_root) {
        expected = cand;
        break;
      }
    }
  }
  EXPECT_EQ(expected, (Poly{1, 0, 1}));
  const Field f9 = field_make(3, 2);
  EXPECT_EQ(f9.modulus(), expected);
  EXPECT_EQ(f9.label(), "3^2");
}

TEST(FieldMake, RejectsBadInput) {
  EXPECT_THROW(field_make(4, 1), ValidationError);
  EXPECT_THROW(field_make(3, 0), ValidationError);
  EXPECT_THROW(field_make(3, 40), ValidationError);
  EXPECT_THROW(field_make(65537, 2), ValidationError);  // 2^32 + ... > 2^31
  EXPECT_THROW(parse_field("6"), ValidationError);
  EXPECT_THROW(parse_field("3^"), ValidationError);
  EXPECT_THROW(parse_field("x"), ValidationError);
}

TEST(FieldMake, Deterministic) {
  for (auto [p, k] : {std::pair{3u, 4u}, {5u, 3u}, {2u, 8u}, {7u, 2u}}) {
    EXPECT_EQ(field_make(p, k).modulus(), field_make(p, k).modulus());
    // The cached table and an uncached recomputation agree.
    EXPECT_EQ(field_make(p, k).modulus(), least_irreducible(PrimeField(p), k));
  }
}

TEST(FieldParse, LabelsAndBarePrimePowers) {
  EXPECT_EQ(parse_field("3^2").label(), "3^2");
  EXPECT_EQ(parse_field("9").label(), "3^2");
  EXPECT_EQ(parse_field("101").label(), "101");
  EXPECT_EQ(parse_field("2^4").order(), 16u);
}

TEST(FieldPow, Examples) {
  const PrimeField f5(5);
  EXPECT_EQ(field_pow(f5, 2, 4), 1u);
  EXPECT_EQ(field_pow(f5, 2, 3), 3u);
  EXPECT_EQ(field_pow(f5, 0, 0), 1u);
  EXPECT_EQ(field_pow(f5, 0, 7), 0u);
}

TEST(QuadraticCharacter, Examples) {
  const PrimeField f5(5), f7(7);
  EXPECT_EQ(quadratic_character(f5, 1), 1);
  EXPECT_EQ(quadratic_character(f7, 0), 0);
  EXPECT_EQ(quadratic_character(f5, 2), -1);
  EXPECT_THROW(quadratic_character(PrimeField(2), 1), ValidationError);
  EXPECT_THROW(quadratic_character(field_make(2, 3), 1), ValidationError);
}

TEST(FieldAxioms, ExhaustiveInversesAndCharacteristic) {
  for (const char* label : kSmallFields) {
    const Field f = parse_field(label);
    const u64 q = f.order();
    Elem p_times_one = 0;
    for (u32 i = 0; i < f.characteristic(); ++i) p_times_one = f.add(p_times_one, 1);
    EXPECT_EQ(p_times_one, 0u) << label;
    for (Elem a = 1; a < q; ++a) {
      ASSERT_EQ(f.mul(a, field_pow(f, a, q - 2)), 1u) << label << " a=" << a;
      ASSERT_EQ(f.mul(a, f.inv(a)), 1u) << label;
      ASSERT_EQ(field_pow(f, a, q - 1), 1u) << label;
      ASSERT_EQ(f.add(a, f.neg(a)), 0u) << label;
    }
  }
}

TEST(FieldAxioms, RingLawsOnSampledTriples) {
  for (const char* label : kSmallFields) {
    const Field f = parse_field(label);
    const u64 q = f.order();
    CounterStream rng(17, q);
    for (int i = 0; i < 2000; ++i) {
      const Elem a = static_cast<Elem>(rng.below(q)), b = static_cast<Elem>(rng.below(q)),
                 c = static_cast<Elem>(rng.below(q));
      ASSERT_EQ(f.add(a, b), f.add(b, a));
      ASSERT_EQ(f.mul(a, b), f.mul(b, a));
      ASSERT_EQ(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
      ASSERT_EQ(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
      ASSERT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c))) << label;
      ASSERT_EQ(f.sub(f.add(a, b), b), a);
    }
  }
}

TEST(FieldAxioms, TableArithmeticMatchesPolynomialArithmetic) {
  // Multiply coefficient vectors modulo the field modulus with the generic
  // polynomial code and compare with the log/Zech tables.
  for (auto [p, k] : {std::pair{3u, 2u}, {2u, 4u}, {5u, 2u}, {3u, 3u}, {7u, 2u}}) {
    const ExtensionField f(p, k);
    ASSERT_TRUE(f.has_tables());
    const PrimeField fp(p);
    auto to_poly = [&](Elem a) {
      std::vector<Elem> d(k);
      f.digits(a, d.data());
      return Poly(d);
    };
    auto from_poly = [&](const Poly& g) {
      std::vector<Elem> d(k, 0);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] = g[i];
      return f.from_digits(d.data());
    };
    for (Elem a = 0; a < f.order(); ++a) {
      for (Elem b = 0; b < f.order(); ++b) {
        const Poly prod = poly_mod(fp, poly_mul(fp, to_poly(a), to_poly(b)), f.modulus());
        ASSERT_EQ(f.mul(a, b), from_poly(prod));
        ASSERT_EQ(f.add(a, b), from_poly(poly_add(fp, to_poly(a), to_poly(b))));
      }
    }
  }
}

TEST(FieldAxioms, LargeExtensionWithoutTables) {
  // 3^13 > 2^20 exercises the direct coefficient-vector path.
  const Field f = field_make(3, 13);
  f.visit([](const auto& fld) {
    if constexpr (std::is_same_v<std::decay_t<decltype(fld)>, ExtensionField>) {
      EXPECT_FALSE(fld.has_tables());
    }
  });
  CounterStream rng(5, 5);
  for (int i = 0; i < 200; ++i) {
    const Elem a = static_cast<Elem>(1 + rng.below(f.order() - 1));
    ASSERT_EQ(f.mul(a, f.inv(a)), 1u);
    ASSERT_EQ(quadratic_character(f, f.mul(a, a)), 1);
  }
}

TEST(QuadraticCharacter, MultiplicativeExhaustive) {
  for (const char* label : {"3", "5", "7", "11", "13", "3^2", "5^2", "3^3", "7^2"}) {
    const Field f = parse_field(label);
    for (Elem x = 0; x < f.order(); ++x) {
      for (Elem y = 0; y < f.order(); ++y) {
        ASSERT_EQ(quadratic_character(f, f.mul(x, y)), quadratic_character(f, x) * quadratic_character(f, y))
            << label;
      }
    }
  }
}

TEST(QuadraticCharacter, HalfOfUnitsAreSquares) {
  for (const char* label : {"3", "5", "7", "11", "13", "3^2", "5^2", "3^3", "7^2", "3^4", "11^2"}) {
    const Field f = parse_field(label);
    const auto squares = oracle::nonzero_squares(f);
    EXPECT_EQ(squares.size(), (f.order() - 1) / 2) << label;
    for (Elem x = 1; x < f.order(); ++x) {
      ASSERT_EQ(quadratic_character(f, x), squares.count(x) ? 1 : -1) << label;
    }
  }
}
