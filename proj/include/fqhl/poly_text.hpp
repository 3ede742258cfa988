#ifndef FQHL_POLY_TEXT_HPP
#define FQHL_POLY_TEXT_HPP

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "fqhl/common.hpp"
#include "fqhl/poly.hpp"

namespace fqhl {

/// Text form of one coefficient: a decimal for elements of the prime subfield,
/// "(c_{k-1},...,c_0)" otherwise.
template <FiniteField F>
std::string format_elem(const F& field, Elem a) {
  const unsigned k = field.degree();
  std::vector<Elem> d(k);
  field.digits(a, d.data());
  bool prime_subfield = true;
  for (unsigned i = 1; i < k; ++i) prime_subfield = prime_subfield && d[i] == 0;
  if (prime_subfield) return std::to_string(d[0]);
  std::string s = "(";
  for (unsigned i = k; i-- > 0;) {
    s += std::to_string(d[i]);
    if (i != 0) s += ',';
  }
  return s + ")";
}

/// Canonical text: descending exponents, zero terms omitted, unit coefficients
/// dropped in front of the variable, "0" for the zero polynomial.
template <FiniteField F>
std::string poly_format(const F& field, const Poly& f, char var = 't') {
  if (f.is_zero()) return "0";
  std::string out;
  for (std::size_t i = f.size(); i-- > 0;) {
    const Elem c = f[i];
    if (c == 0) continue;
    if (!out.empty()) out += '+';
    if (i == 0) {
      out += format_elem(field, c);
      continue;
    }
    if (c != 1) out += format_elem(field, c) + "*";
    out += var;
    if (i > 1) out += "^" + std::to_string(i);
  }
  return out;
}

namespace detail {

template <FiniteField F>
class PolyParser {
 public:
  PolyParser(const F& field, std::string_view s) : field_(field), s_(s) {}

  Poly parse() {
    std::vector<Elem> acc;
    bool negate = false;
    if (peek() == '-') {
      negate = true;
      ++pos_;
    }
    for (;;) {
      auto [coeff, exp] = term();
      if (negate) coeff = field_.neg(coeff);
      if (acc.size() <= exp) acc.resize(exp + 1, 0);
      acc[exp] = field_.add(acc[exp], coeff);
      if (pos_ == s_.size()) break;
      const char c = s_[pos_];
      if (c != '+' && c != '-') fail("expected '+' or '-'");
      negate = c == '-';
      ++pos_;
    }
    return Poly(std::move(acc));
  }

  char var() const noexcept { return var_; }

 private:
  char peek() const noexcept { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  bool at_var() const noexcept { return peek() == 't' || peek() == 'U'; }

  std::pair<Elem, std::size_t> term() {
    Elem coeff = 1;
    if (at_var()) return {coeff, var_power()};
    coeff = coefficient();
    if (peek() != '*') return {coeff, 0};
    ++pos_;
    if (!at_var()) fail("expected variable");
    return {coeff, var_power()};
  }

  std::size_t var_power() {
    const char v = s_[pos_];
    if (var_ != '\0' && var_ != v) fail("mixed variables");
    var_ = v;
    ++pos_;
    if (peek() != '^') return 1;
    ++pos_;
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected exponent");
    const u64 e = decimal();
    if (e > 4096) fail("exponent too large");
    return static_cast<std::size_t>(e);
  }

  u64 decimal() {
    const std::size_t start = pos_;
    u64 v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      const u64 d = static_cast<u64>(s_[pos_] - '0');
      if (v > (~u64{0} - d) / 10) {
        pos_ = start;
        fail("number too large");
      }
      v = v * 10 + d;
      ++pos_;
    }
    return v;
  }

  Elem reduce(u64 v) const { return field_.from_int(static_cast<std::int64_t>(v % field_.characteristic())); }

  Elem coefficient() {
    if (std::isdigit(static_cast<unsigned char>(peek()))) return reduce(decimal());
    if (peek() != '(') fail("expected coefficient or variable");
    const std::size_t start = pos_;
    ++pos_;
    std::vector<Elem> digits_high_first;
    for (;;) {
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected digit in tuple");
      digits_high_first.push_back(reduce(decimal()));
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() != ')') fail("expected ',' or ')'");
      ++pos_;
      break;
    }
    const unsigned k = field_.degree();
    if (digits_high_first.size() != k) {
      throw ParseError("coefficient tuple has " + std::to_string(digits_high_first.size()) +
                           " entries, field degree is " + std::to_string(k),
                       start);
    }
    std::vector<Elem> low_first(digits_high_first.rbegin(), digits_high_first.rend());
    return field_.from_digits(low_first.data());
  }

  const F& field_;
  std::string_view s_;
  std::size_t pos_ = 0;
  char var_ = '\0';
};

}  // namespace detail

/// Parses the polynomial text grammar in variable t or U.
template <FiniteField F>
Poly poly_parse(const F& field, std::string_view s) {
  if (s.empty()) throw ParseError("empty polynomial", 0);
  return detail::PolyParser<F>(field, s).parse();
}

/// Splits a comma-separated offset list at parenthesis depth zero.
inline std::vector<std::string> split_poly_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

}  // namespace fqhl

#endif  // FQHL_POLY_TEXT_HPP
