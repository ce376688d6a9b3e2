#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qcf/rational.hpp"

namespace qcf {

class NonUnitSeries : public QcfError {
 public:
  using QcfError::QcfError;
};

class NegativePower : public QcfError {
 public:
  using QcfError::QcfError;
};

class FormallyDivergentProduct : public QcfError {
 public:
  using QcfError::QcfError;
};

/// Truncated formal power series c_0 + c_1 q + ... + c_N q^N + O(q^{N+1}).
///
/// The order N is inclusive and always explicit. Binary operations on
/// operands of different order truncate to the smaller one.
class QSeries {
 public:
  QSeries() : coeffs_(1) {}
  explicit QSeries(int order) : coeffs_(static_cast<std::size_t>(std::max(order, 0)) + 1) {
    if (order < 0) throw QcfError("negative truncation order");
  }
  QSeries(int order, std::initializer_list<Rational> leading) : QSeries(order) {
    std::size_t i = 0;
    for (const auto& c : leading) {
      if (i > static_cast<std::size_t>(order)) break;
      coeffs_[i++] = c;
    }
  }
  explicit QSeries(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw QcfError("series needs at least one coefficient");
  }

  static QSeries zero(int order) { return QSeries(order); }
  static QSeries one(int order) {
    QSeries s(order);
    s.coeffs_[0] = 1;
    return s;
  }
  static QSeries constant(const Rational& c, int order) {
    QSeries s(order);
    s.coeffs_[0] = c;
    return s;
  }
  // c q^power, truncated away when power > order.
  static QSeries monomial(const Rational& c, int power, int order) {
    if (power < 0) throw NegativePower("negative power in series monomial");
    QSeries s(order);
    if (power <= order) s.coeffs_[static_cast<std::size_t>(power)] = c;
    return s;
  }

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Rational& operator[](int i) const { return coeffs_[static_cast<std::size_t>(i)]; }
  Rational& operator[](int i) { return coeffs_[static_cast<std::size_t>(i)]; }
  std::span<const Rational> coeffs() const { return coeffs_; }

  bool is_unit() const { return !is_zero(coeffs_[0]); }
  bool is_zero_series() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& c) { return is_zero(c); });
  }
  // Lowest power with a nonzero coefficient, if any within the order.
  std::optional<int> valuation() const {
    for (int i = 0; i <= order(); ++i)
      if (!is_zero(coeffs_[static_cast<std::size_t>(i)])) return i;
    return std::nullopt;
  }

  QSeries truncated(int new_order) const {
    if (new_order > order()) throw QcfError("cannot extend a truncated series");
    return QSeries(std::vector<Rational>(coeffs_.begin(), coeffs_.begin() + new_order + 1));
  }

  QSeries& operator+=(const QSeries& o) {
    if (o.order() < order()) coeffs_.resize(static_cast<std::size_t>(o.order()) + 1);
    for (int i = 0; i <= order(); ++i) (*this)[i] += o[i];
    return *this;
  }
  QSeries& operator-=(const QSeries& o) {
    if (o.order() < order()) coeffs_.resize(static_cast<std::size_t>(o.order()) + 1);
    for (int i = 0; i <= order(); ++i) (*this)[i] -= o[i];
    return *this;
  }
  QSeries& operator*=(const Rational& c) {
    for (auto& x : coeffs_) x *= c;
    return *this;
  }

  friend bool operator==(const QSeries& x, const QSeries& y) { return x.coeffs_ == y.coeffs_; }

 private:
  std::vector<Rational> coeffs_;
};

inline QSeries operator+(QSeries x, const QSeries& y) { return x += y; }
inline QSeries operator-(QSeries x, const QSeries& y) { return x -= y; }
inline QSeries operator-(QSeries x) {
  x *= Rational(-1);
  return x;
}
inline QSeries operator*(QSeries x, const Rational& c) { return x *= c; }
inline QSeries operator*(const Rational& c, QSeries x) { return x *= c; }

// Truncated Cauchy product. Skips zero coefficients, so sparse operands
// (short polynomials in q) cost O(N * nnz).
inline QSeries operator*(const QSeries& x, const QSeries& y) {
  const int n = std::min(x.order(), y.order());
  QSeries r(n);
  std::vector<int> ynz;
  for (int j = 0; j <= n; ++j)
    if (!is_zero(y[j])) ynz.push_back(j);
  Rational t;
  for (int i = 0; i <= n; ++i) {
    if (is_zero(x[i])) continue;
    for (int j : ynz) {
      if (i + j > n) break;
      t = x[i] * y[j];
      r[i + j] += t;
    }
  }
  return r;
}

inline QSeries series_add(const QSeries& x, const QSeries& y) { return x + y; }
inline QSeries series_mul(const QSeries& x, const QSeries& y) { return x * y; }

// x / d for unit d, truncated to min order. O(N * nnz(d)).
inline QSeries divide(const QSeries& x, const QSeries& d) {
  if (!d.is_unit()) throw NonUnitSeries("division by a series with zero constant term");
  const int n = std::min(x.order(), d.order());
  std::vector<int> dnz;
  for (int j = 1; j <= n; ++j)
    if (!is_zero(d[j])) dnz.push_back(j);
  const Rational inv0 = 1 / d[0];
  QSeries e(n);
  Rational acc, t;
  for (int k = 0; k <= n; ++k) {
    acc = x[k];
    for (int j : dnz) {
      if (j > k) break;
      t = d[j] * e[k - j];
      acc -= t;
    }
    e[k] = acc * inv0;
  }
  return e;
}

inline QSeries inverse(const QSeries& d) { return divide(QSeries::one(d.order()), d); }
inline QSeries series_inv(const QSeries& d) { return inverse(d); }

// Lowest power where x and y differ, compared up to the smaller order.
inline std::optional<int> first_mismatch(const QSeries& x, const QSeries& y) {
  const int n = std::min(x.order(), y.order());
  for (int i = 0; i <= n; ++i)
    if (x[i] != y[i]) return i;
  return std::nullopt;
}

/// A single term c q^power.
///
/// As a series factor the power must be non-negative. Negative powers are
/// allowed only where a monomial acts as a parameter weight (for example
/// the substitution a -> b/q), and are rejected when touching a series.
struct QMonomial {
  Rational coef{0};
  int power = 0;

  QMonomial() = default;
  QMonomial(Rational c, int p = 0) : coef(std::move(c)), power(p) {
    if (is_zero(coef)) power = 0;
  }

  bool is_zero_monomial() const { return is_zero(coef); }
  QMonomial inverse() const {
    if (is_zero(coef)) throw QcfError("inverse of the zero monomial");
    return QMonomial(1 / coef, -power);
  }
  friend QMonomial operator*(const QMonomial& x, const QMonomial& y) {
    return QMonomial(x.coef * y.coef, x.power + y.power);
  }
  friend bool operator==(const QMonomial& x, const QMonomial& y) {
    return x.coef == y.coef && x.power == y.power;
  }
};

inline QSeries monomial_mul(const QMonomial& m, const QSeries& x) {
  QSeries r(x.order());
  if (m.is_zero_monomial()) return r;
  if (m.power < 0) throw NegativePower("monomial with negative power applied to a series");
  for (int i = 0; i + m.power <= x.order(); ++i) r[i + m.power] = m.coef * x[i];
  return r;
}

// x / q^m, losing the top m orders. Requires the low m coefficients to vanish.
inline QSeries shift_down(const QSeries& x, int m) {
  if (m > x.order()) throw QcfError("shift exceeds truncation order");
  std::vector<Rational> c(x.coeffs().begin() + m, x.coeffs().end());
  return QSeries(std::move(c));
}

/// Finite Laurent polynomial in q with rational coefficients.
///
/// Used to assemble continued-fraction elements and term ratios from
/// graded parameters before converting to a QSeries.
class LaurentPoly {
 public:
  LaurentPoly() = default;
  LaurentPoly(const Rational& c) { add_term(c, 0); }
  LaurentPoly(int c) { add_term(Rational(c), 0); }
  LaurentPoly(const QMonomial& m) { add_term(m.coef, m.power); }

  static LaurentPoly q_pow(int p, const Rational& c = Rational(1)) {
    LaurentPoly r;
    r.add_term(c, p);
    return r;
  }

  void add_term(const Rational& c, int p) {
    if (is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(p, c);
    if (!inserted) {
      it->second += c;
      if (is_zero(it->second)) terms_.erase(it);
    }
  }

  bool is_zero_poly() const { return terms_.empty(); }
  const std::map<int, Rational>& terms() const { return terms_; }
  std::optional<int> valuation() const {
    if (terms_.empty()) return std::nullopt;
    return terms_.begin()->first;
  }
  int degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }
  Rational coefficient(int p) const {
    auto it = terms_.find(p);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  // Divides by q^v where v is the valuation; the result has a nonzero constant term.
  LaurentPoly normalized() const {
    LaurentPoly r;
    if (terms_.empty()) return r;
    int v = terms_.begin()->first;
    for (const auto& [p, c] : terms_) r.terms_.emplace(p - v, c);
    return r;
  }

  QSeries to_series(int order) const {
    QSeries s(order);
    for (const auto& [p, c] : terms_) {
      if (p < 0) throw NegativePower("Laurent polynomial has negative powers");
      if (p <= order) s[p] += c;
    }
    return s;
  }

  double evaluate(double q) const;
  Rational evaluate(const Rational& q) const;

  LaurentPoly& operator+=(const LaurentPoly& o) {
    for (const auto& [p, c] : o.terms_) add_term(c, p);
    return *this;
  }
  LaurentPoly& operator-=(const LaurentPoly& o) {
    for (const auto& [p, c] : o.terms_) add_term(-c, p);
    return *this;
  }
  friend LaurentPoly operator+(LaurentPoly x, const LaurentPoly& y) { return x += y; }
  friend LaurentPoly operator-(LaurentPoly x, const LaurentPoly& y) { return x -= y; }
  friend LaurentPoly operator-(const LaurentPoly& x) { return LaurentPoly() - x; }
  friend LaurentPoly operator*(const LaurentPoly& x, const LaurentPoly& y) {
    LaurentPoly r;
    for (const auto& [p, c] : x.terms_)
      for (const auto& [p2, c2] : y.terms_) r.add_term(c * c2, p + p2);
    return r;
  }
  friend bool operator==(const LaurentPoly& x, const LaurentPoly& y) { return x.terms_ == y.terms_; }

 private:
  std::map<int, Rational> terms_;
};

inline double LaurentPoly::evaluate(double q) const {
  double s = 0;
  for (const auto& [p, c] : terms_) {
    double qp = 1;
    const double base = p < 0 ? 1 / q : q;
    for (int i = 0; i < (p < 0 ? -p : p); ++i) qp *= base;
    s += c.get_d() * qp;
  }
  return s;
}

inline Rational LaurentPoly::evaluate(const Rational& q) const {
  Rational s(0);
  for (const auto& [p, c] : terms_) {
    if (p < 0 && is_zero(q)) throw QcfError("negative power evaluated at q = 0");
    const Rational base = p < 0 ? Rational(1 / q) : q;
    const unsigned long e = static_cast<unsigned long>(p < 0 ? -p : p);
    Integer num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
    s += c * Rational(num, den);
  }
  return s;
}

// "1 + b*q^2 - a*q^3" style, ascending powers.
inline std::string to_string(const LaurentPoly& x) {
  if (x.is_zero_poly()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [p, c] : x.terms()) {
    Rational mag = abs(c);
    if (first) {
      if (sgn(c) < 0) os << "-";
    } else {
      os << (sgn(c) < 0 ? " - " : " + ");
    }
    first = false;
    const bool unit = mag == 1 && p != 0;
    if (!unit) os << mag.get_str();
    if (p != 0) {
      if (!unit) os << "*";
      os << "q";
      if (p != 1) os << "^" << p;
    }
  }
  return os.str();
}

// c q^p as a LaurentPoly.
inline LaurentPoly qm(const Rational& c, int p) { return LaurentPoly::q_pow(p, c); }
inline LaurentPoly qm(int c, int p) { return LaurentPoly::q_pow(p, Rational(c)); }

/// (base; q^step)_k = prod_{j<k} (1 - base q^{step j}); k = 0 gives 1.
inline QSeries pochhammer_finite(const QMonomial& base, int k, int order, int step = 1) {
  if (base.power < 0) throw NegativePower("Pochhammer base must have non-negative power");
  QSeries r = QSeries::one(order);
  if (base.is_zero_monomial()) return r;
  for (int j = 0; j < k; ++j) {
    const int p = base.power + step * j;
    if (p > order) break;
    if (p == 0) {
      r *= Rational(1 - base.coef);
      continue;
    }
    // r * (1 - c q^p), in place from the top down
    for (int i = order; i >= p; --i) r[i] -= base.coef * r[i - p];
  }
  return r;
}

/// (base; q^step)_inf truncated to the given order. Only factors with
/// base.power + step*j <= order affect the retained coefficients.
inline QSeries pochhammer_infinite(const QMonomial& base, int order, int step = 1) {
  if (step < 1) throw QcfError("Pochhammer step must be positive");
  if (base.is_zero_monomial()) return QSeries::one(order);
  if (base.power <= 0)
    throw FormallyDivergentProduct("infinite Pochhammer symbol needs a base carrying at least q^1");
  const int factors = (order - base.power) / step + 1;
  return pochhammer_finite(base, std::max(factors, 0), order, step);
}

// Text rendering: "c0 + c1*q + ... + cN*q^N + O(q^(N+1))". Zero terms are skipped.
inline std::string to_string(const QSeries& s) {
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i <= s.order(); ++i) {
    const Rational& c = s[i];
    if (is_zero(c)) continue;
    Rational mag = abs(c);
    if (first) {
      if (sgn(c) < 0) os << "-";
    } else {
      os << (sgn(c) < 0 ? " - " : " + ");
    }
    first = false;
    os << mag.get_str();
    if (i == 1) os << "*q";
    if (i > 1) os << "*q^" << i;
  }
  if (first) os << "0";
  os << " + O(q^" << s.order() + 1 << ")";
  return os.str();
}

inline std::string to_string(const QMonomial& m) {
  if (m.is_zero_monomial()) return "0";
  std::string c = m.coef.get_str();
  if (m.power == 0) return c;
  std::string q = m.power == 1 ? "q" : "q^" + std::to_string(m.power);
  if (m.coef == 1) return q;
  if (m.coef == -1) return "-" + q;
  return c + "*" + q;
}

inline std::vector<std::string> coefficient_strings(const QSeries& s) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(s.order()) + 1);
  for (const auto& c : s.coeffs()) out.push_back(c.get_str());
  return out;
}

inline QSeries series_from_strings(const std::vector<std::string>& cs) {
  std::vector<Rational> v;
  v.reserve(cs.size());
  for (const auto& c : cs) v.push_back(parse_rational(c));
  return QSeries(std::move(v));
}

}  // namespace qcf
