#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qcf/qseries.hpp"

namespace qcf {

class NonUnitDenominator : public QcfError {
 public:
  using QcfError::QcfError;
};

struct ElementPair {
  QSeries a;
  QSeries b;
};

struct PolyElement {
  LaurentPoly a;
  LaurentPoly b;
};

/// b0 + a1/(b1 + a2/(b2 + ...)), or its reciprocal when `inverted`.
///
/// Elements come from a rule n -> (a_n, b_n). Fractions built from
/// polynomial rules keep them, so they can be rendered and evaluated at a
/// numeric q; derived fractions (e.g. after an equivalence transform) only
/// have the series rule.
///
/// The inverted form stores value = 1/(b0 + K(a_n/b_n)). Many classical
/// fractions are written 1/(1 + a1/(1 + ...)); storing the leading "1/" as a
/// flag keeps a_1 as the first real partial numerator.
class CFrac {
 public:
  using SeriesB0 = std::function<QSeries(int order)>;
  using SeriesRule = std::function<ElementPair(int n, int order)>;
  using PolyRule = std::function<PolyElement(int n)>;

  static CFrac polynomial(LaurentPoly b0, PolyRule rule, bool inverted = false,
                          std::optional<int> depth_hint = std::nullopt) {
    CFrac cf;
    cf.poly_b0_ = b0;
    cf.poly_rule_ = rule;
    cf.b0_ = [b0](int order) { return b0.to_series(order); };
    cf.rule_ = [rule](int n, int order) {
      const PolyElement e = rule(n);
      return ElementPair{e.a.to_series(order), e.b.to_series(order)};
    };
    cf.inverted_ = inverted;
    cf.depth_hint_ = depth_hint;
    return cf;
  }

  static CFrac from_series(SeriesB0 b0, SeriesRule rule, bool inverted = false,
                           std::optional<int> depth_hint = std::nullopt) {
    CFrac cf;
    cf.b0_ = std::move(b0);
    cf.rule_ = std::move(rule);
    cf.inverted_ = inverted;
    cf.depth_hint_ = depth_hint;
    return cf;
  }

  QSeries b0(int order) const { return b0_(order); }

  ElementPair element(int n, int order) const {
    if (n < 1) throw QcfError("continued-fraction elements are indexed from 1");
    if (depth_hint_ && n > *depth_hint_) throw QcfError("element index beyond the fraction's depth");
    return rule_(n, order);
  }

  bool inverted() const { return inverted_; }
  std::optional<int> depth_hint() const { return depth_hint_; }
  bool has_polynomial_rule() const { return poly_rule_ != nullptr; }
  const LaurentPoly& poly_b0() const {
    if (!poly_b0_) throw QcfError("fraction has no polynomial form");
    return *poly_b0_;
  }
  PolyElement poly_element(int n) const {
    if (!poly_rule_) throw QcfError("fraction has no polynomial form");
    if (n < 1) throw QcfError("continued-fraction elements are indexed from 1");
    if (depth_hint_ && n > *depth_hint_) throw QcfError("element index beyond the fraction's depth");
    return poly_rule_(n);
  }

 private:
  CFrac() = default;

  SeriesB0 b0_;
  SeriesRule rule_;
  std::optional<LaurentPoly> poly_b0_;
  PolyRule poly_rule_;
  bool inverted_ = false;
  std::optional<int> depth_hint_;
};

/// A_n, B_n for n = -1..depth via A_n = b_n A_{n-1} + a_n A_{n-2}.
class Convergents {
 public:
  Convergents(const CFrac& cf, int depth, int order) {
    if (depth < 0) throw QcfError("negative depth");
    A_.reserve(static_cast<std::size_t>(depth) + 2);
    B_.reserve(static_cast<std::size_t>(depth) + 2);
    A_.push_back(QSeries::one(order));
    A_.push_back(cf.b0(order));
    B_.push_back(QSeries::zero(order));
    B_.push_back(QSeries::one(order));
    for (int n = 1; n <= depth; ++n) {
      const ElementPair e = cf.element(n, order);
      A_.push_back(e.b * A(n - 1) + e.a * A(n - 2));
      B_.push_back(e.b * B(n - 1) + e.a * B(n - 2));
    }
  }

  int depth() const { return static_cast<int>(A_.size()) - 2; }
  const QSeries& A(int n) const { return A_.at(static_cast<std::size_t>(n + 1)); }
  const QSeries& B(int n) const { return B_.at(static_cast<std::size_t>(n + 1)); }

 private:
  std::vector<QSeries> A_;
  std::vector<QSeries> B_;
};

namespace detail {

inline QSeries checked_ratio(const QSeries& num, const QSeries& den, const char* what) {
  if (!den.is_unit()) throw NonUnitDenominator(std::string(what) + " has zero constant term");
  return divide(num, den);
}

}  // namespace detail

/// S_n(0) = A_n / B_n (B_n / A_n for an inverted fraction).
inline QSeries approximant(const CFrac& cf, int n, int order) {
  const Convergents c(cf, n, order);
  if (cf.inverted()) return detail::checked_ratio(c.B(n), c.A(n), "A_n");
  return detail::checked_ratio(c.A(n), c.B(n), "B_n");
}

/// All approximants S_1(0)..S_depth(0) from a single pass of the recurrence.
inline std::vector<QSeries> approximants(const CFrac& cf, int depth, int order) {
  const Convergents c(cf, depth, order);
  std::vector<QSeries> out;
  for (int n = 1; n <= depth; ++n)
    out.push_back(cf.inverted() ? detail::checked_ratio(c.B(n), c.A(n), "A_n")
                                : detail::checked_ratio(c.A(n), c.B(n), "B_n"));
  return out;
}

/// S_n(w) = (A_n + A_{n-1} w) / (B_n + B_{n-1} w), reciprocal when inverted.
inline QSeries modified_approximant(const CFrac& cf, int n, const QSeries& w, int order) {
  const Convergents c(cf, n, order);
  QSeries num = c.A(n) + c.A(n - 1) * w;
  QSeries den = c.B(n) + c.B(n - 1) * w;
  if (cf.inverted()) std::swap(num, den);
  return detail::checked_ratio(num, den, "modified denominator");
}

/// K(a_{N0+n}/b_{N0+n}) with b0 = 0.
inline CFrac tail(const CFrac& cf, int n0) {
  if (n0 < 0) throw QcfError("tail index must be non-negative");
  std::optional<int> hint;
  if (cf.depth_hint()) hint = *cf.depth_hint() - n0;
  if (cf.has_polynomial_rule())
    return CFrac::polynomial(
        LaurentPoly(), [cf, n0](int n) { return cf.poly_element(n + n0); }, false, hint);
  return CFrac::from_series([](int order) { return QSeries::zero(order); },
                            [cf, n0](int n, int order) { return cf.element(n + n0, order); }, false, hint);
}

/// Equivalent fraction with b_n' = 1 and a_n' = a_n / (b_{n-1} b_n), where
/// b_0 is taken as 1. b0 itself is unchanged, so every approximant is kept.
inline CFrac equivalence_unit_denominators(const CFrac& cf, int depth) {
  if (depth < 1) throw QcfError("depth must be at least 1");
  auto rule = [cf](int n, int order) {
    const ElementPair e = cf.element(n, order);
    QSeries d = e.b;
    if (n > 1) d = d * cf.element(n - 1, order).b;
    if (!d.is_unit()) throw NonUnitDenominator("b_n has zero constant term");
    return ElementPair{divide(e.a, d), QSeries::one(order)};
  };
  return CFrac::from_series([cf](int order) { return cf.b0(order); }, rule, cf.inverted(), depth);
}

/// Rewrites 1/(b0 + K) as 0 + 1/(b0 + a1/(b1 + ...)), so element n+1 of the
/// result is element n of the input. Non-inverted fractions are returned as is.
inline CFrac to_standard_form(const CFrac& cf) {
  if (!cf.inverted()) return cf;
  std::optional<int> hint;
  if (cf.depth_hint()) hint = *cf.depth_hint() + 1;
  if (cf.has_polynomial_rule()) {
    return CFrac::polynomial(
        LaurentPoly(),
        [cf](int n) { return n == 1 ? PolyElement{LaurentPoly(1), cf.poly_b0()} : cf.poly_element(n - 1); },
        false, hint);
  }
  return CFrac::from_series(
      [](int order) { return QSeries::zero(order); },
      [cf](int n, int order) {
        return n == 1 ? ElementPair{QSeries::one(order), cf.b0(order)} : cf.element(n - 1, order);
      },
      false, hint);
}

/// Adds delta to the lowest coefficient of a_n. Used as a negative control.
inline CFrac perturbed(const CFrac& cf, int index, const Rational& delta) {
  if (cf.has_polynomial_rule()) {
    return CFrac::polynomial(
        cf.poly_b0(),
        [cf, index, delta](int n) {
          PolyElement e = cf.poly_element(n);
          if (n == index) e.a.add_term(delta, e.a.valuation().value_or(0));
          return e;
        },
        cf.inverted(), cf.depth_hint());
  }
  return CFrac::from_series(
      [cf](int order) { return cf.b0(order); },
      [cf, index, delta](int n, int order) {
        ElementPair e = cf.element(n, order);
        if (n == index) e.a[e.a.valuation().value_or(0)] += delta;
        return e;
      },
      cf.inverted(), cf.depth_hint());
}

/// Sum of val(a_i) for i = 1..depth+1, capped at order+1. For a fraction
/// whose partial denominators are units, S_depth(0) agrees with the value
/// of the infinite fraction below this power.
inline int contact_bound(const CFrac& cf, int depth, int order) {
  long total = 0;
  for (int i = 1; i <= depth + 1; ++i) {
    if (cf.depth_hint() && i > *cf.depth_hint()) return order + 1;
    const auto v = cf.element(i, order).a.valuation();
    total += v ? *v : order + 1;
    if (total > order) return order + 1;
  }
  return static_cast<int>(total);
}

inline std::string render(const CFrac& cf, int count, int order = 8) {
  auto show_b0 = [&] { return cf.has_polynomial_rule() ? to_string(cf.poly_b0()) : to_string(cf.b0(order)); };
  std::string out = cf.inverted() ? "1/(" + show_b0() + " +)" : show_b0() + " +";
  for (int n = 1; n <= count; ++n) {
    if (cf.depth_hint() && n > *cf.depth_hint()) break;
    std::string a, b;
    if (cf.has_polynomial_rule()) {
      const PolyElement e = cf.poly_element(n);
      a = to_string(e.a);
      b = to_string(e.b);
    } else {
      const ElementPair e = cf.element(n, order);
      a = to_string(e.a);
      b = to_string(e.b);
    }
    out += " (" + a + ")/(" + b + " +)";
  }
  return out + " ...";
}

inline nlohmann::json approximant_table_json(const CFrac& cf, const QSeries& target, int depth, int order) {
  nlohmann::json rows = nlohmann::json::array();
  const auto apps = approximants(cf, depth, order);
  for (int n = 1; n <= depth; ++n) {
    const QSeries& s = apps[static_cast<std::size_t>(n - 1)];
    const auto mm = first_mismatch(s, target);
    rows.push_back({{"n", n},
                    {"first_mismatch", mm ? nlohmann::json(*mm) : nlohmann::json(nullptr)},
                    {"coefficients", coefficient_strings(s)}});
  }
  return {{"order", order}, {"target", coefficient_strings(target)}, {"rows", rows}};
}

}  // namespace qcf
