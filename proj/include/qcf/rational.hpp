#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qcf {

// Exact rational, always canonical (lowest terms, positive denominator).
// mpq_class arithmetic keeps results canonical; construct through
// make_rational() when starting from a raw numerator/denominator pair.
using Rational = mpq_class;
using Integer = mpz_class;

class QcfError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public QcfError {
 public:
  using QcfError::QcfError;
};

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw QcfError("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw QcfError("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// "p/q", or "p" when q == 1.
inline std::string to_string(const Rational& r) { return r.get_str(); }

// Accepts "p", "p/q", with optional leading sign. No decimals.
inline std::optional<Rational> try_parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  auto valid_int = [](std::string_view s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!valid_int(num, true) || !valid_int(den, false)) return std::nullopt;
  std::string n(num);
  if (n[0] == '+') n.erase(0, 1);
  Integer zn(n, 10), zd(std::string(den), 10);
  if (zd == 0) return std::nullopt;
  return make_rational(zn, zd);
}

inline Rational parse_rational(std::string_view text) {
  auto r = try_parse_rational(text);
  if (!r) throw ParseError("not an exact rational: '" + std::string(text) + "'");
  return *r;
}

inline bool is_zero(const Rational& r) { return sgn(r) == 0; }

}  // namespace qcf
