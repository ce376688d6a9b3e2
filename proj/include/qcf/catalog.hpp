#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qcf/cfrac.hpp"
#include "qcf/euler.hpp"
#include "qcf/families.hpp"

namespace qcf {

enum class Kind { cf_equals_series_ratio, series_transformation, product_identity, recurrence, cf_equals_product_ratio };

inline std::string to_string(Kind k) {
  switch (k) {
    case Kind::cf_equals_series_ratio: return "cf_equals_series_ratio";
    case Kind::series_transformation: return "series_transformation";
    case Kind::product_identity: return "product_identity";
    case Kind::recurrence: return "recurrence";
    case Kind::cf_equals_product_ratio: return "cf_equals_product_ratio";
  }
  return "?";
}

inline bool is_cf_kind(Kind k) { return k == Kind::cf_equals_series_ratio || k == Kind::cf_equals_product_ratio; }

/// Two series that must agree coefficient by coefficient through q^through.
struct Comparison {
  std::string label;
  QSeries lhs;
  QSeries rhs;
  int through = 0;
};

/// Negative control: adds delta to the lowest coefficient of a_element.
struct Perturbation {
  int element = 0;
  Rational delta{1};
  bool active() const { return element > 0; }
};

using ComparisonBuilder = std::function<std::vector<Comparison>(const ParamPoint&, int order, int depth)>;

struct CFSpec {
  std::function<CFrac(const ParamPoint&)> fraction;
  std::function<QSeries(const ParamPoint&, int order)> target;
};

struct ReductionLink {
  std::string target_id;
  std::string substitution;
  ComparisonBuilder check;
};

struct IdentityEntry {
  std::string id;
  std::string title;
  Kind kind = Kind::series_transformation;
  bool parameter_free = false;
  // Returns the reason a point is excluded, if it is.
  std::function<std::optional<std::string>(const ParamPoint&)> constraint;
  int default_order = 40;
  int default_depth = 8;
  std::string grading;     // parameters replaced by x*q before building series
  std::string conditions;  // analytic side conditions, used by numeric mode only
  std::optional<CFSpec> cf;
  ComparisonBuilder extra;
  std::vector<ReductionLink> links;
};

namespace catalog_detail {

using L = LaurentPoly;

inline L mq(const Rational& c, int p) { return qm(c, p); }
inline L qp(int p) { return qm(1, p); }
inline L one_minus_q(int p) { return L(1) - qp(p); }

inline QSeries ser(const L& x, int order) { return x.to_series(order); }
inline QSeries pinf(const QMonomial& base, int order, int step = 1) { return pochhammer_infinite(base, order, step); }
inline QSeries fam(Family f, int s, const GradedPoint& g, int order) { return build_family(f, s, g, order); }

inline Comparison cmp(std::string label, QSeries lhs, QSeries rhs) {
  const int through = std::min(lhs.order(), rhs.order());
  return {std::move(label), std::move(lhs), std::move(rhs), through};
}

inline Comparison three_term(std::string label, const QSeries& s0, const QSeries& s1, const QSeries& s2,
                             const QSeries& c1, const QSeries& c2, int order) {
  return cmp(std::move(label), s0.truncated(order), c1 * s1 + c2 * s2);
}

// n = 2m-1 -> alpha q^m + l q^n, n = 2m -> beta q^m + l q^n
inline L interlaced(int n, const Rational& alpha, const Rational& beta, const Rational& lambda) {
  const int m = (n + 1) / 2;
  return (n % 2 ? mq(alpha, m) : mq(beta, m)) + mq(lambda, n);
}

inline void compare_elements(std::vector<Comparison>& out, const CFrac& x, const CFrac& y, int depth, int order,
                             bool with_b0) {
  if (with_b0) out.push_back(cmp("b0", x.b0(order), y.b0(order)));
  for (int n = 1; n <= depth; ++n) {
    const ElementPair ex = x.element(n, order), ey = y.element(n, order);
    out.push_back(cmp("a_" + std::to_string(n), ex.a, ey.a));
    out.push_back(cmp("b_" + std::to_string(n), ex.b, ey.b));
  }
}

// Fractions. All but ENTRY11 and the special Rogers-Ramanujan form are
// stored inverted: value = 1/(b0 + K(a_n/b_n)).

inline CFrac rr_cf(const Rational& a) {
  return CFrac::polynomial(1, [a](int n) { return PolyElement{mq(a, n), 1}; }, true);
}

inline CFrac rr_special_cf() {
  return CFrac::polynomial(1, [](int n) { return PolyElement{qp(n), 1}; }, false);
}

inline CFrac g_cfrac2(const Rational& b, const Rational& l) {
  return CFrac::polynomial(1, [b, l](int n) { return PolyElement{mq(l, n), L(1) + mq(b, n)}; }, true);
}

inline CFrac g_cfrac1(const Rational& b, const Rational& l) {
  return CFrac::polynomial(1, [b, l](int n) { return PolyElement{interlaced(n, 0, b, l), 1}; }, true);
}

inline CFrac g_cfrac3(const QMonomial& b, const Rational& l) {
  const L B(b);
  return CFrac::polynomial(L(1) - B, [B, l](int n) { return PolyElement{B + mq(l, n), L(1) - B}; }, true);
}

inline CFrac heine_cf(const Rational& a, const Rational& b, const Rational& l) {
  return CFrac::polynomial(
      1,
      [a, b, l](int n) {
        const int m = (n + 1) / 2;
        L an = n % 2 ? mq(a, m) + mq(l, n) : mq(l, n) - mq(a * b, 3 * m);
        return PolyElement{an, L(1) + mq(b, n)};
      },
      true);
}

inline CFrac ramanujan_g1(const Rational& a, const Rational& b, const Rational& l) {
  return CFrac::polynomial(1, [a, b, l](int n) { return PolyElement{interlaced(n, a, b, l), 1}; }, true);
}

inline CFrac ramanujan_g2(const Rational& a, const Rational& b, const Rational& l) {
  return CFrac::polynomial(
      L(1) + mq(a, 1),
      [a, b, l](int n) { return PolyElement{mq(l, n) - mq(a * b, 2 * n), L(1) + mq(a, n + 1) + mq(b, n)}; }, true);
}

inline CFrac hirschhorn(const QMonomial& a, const Rational& b, const Rational& l) {
  const L aq = L(a) * qp(1);
  return CFrac::polynomial(
      1, [aq, b, l](int n) { return PolyElement{aq + mq(l, n), L(1) - aq + mq(b, n)}; }, true);
}

inline CFrac heine_cf_a(const Rational& a, const Rational& b, const Rational& l) {
  return CFrac::polynomial(
      L(1) + mq(a, 1),
      [a, b, l](int n) {
        const int s = (n - 1) / 2;
        L an = n % 2 ? mq(l, n) - mq(a * b, 3 * s + 2) : mq(l, n) + mq(b, n / 2);
        return PolyElement{an, L(1) + mq(a, n + 1)};
      },
      true);
}

inline CFrac eisenstein_cf(const Rational& a) {
  return CFrac::polynomial(
      1,
      [a](int n) {
        const int m = (n + 1) / 2;
        return PolyElement{n % 2 ? mq(a, n) : mq(a, n) - mq(a, m), 1};
      },
      true);
}

inline CFrac entry11_cf(const QMonomial& a, const QMonomial& b) {
  const L A(a), B(b);
  return CFrac::polynomial(
      L(),
      [A, B](int n) {
        if (n == 1) return PolyElement{A - B, one_minus_q(1)};
        return PolyElement{qp(n - 2) * (A - B * qp(n - 1)) * (A * qp(n - 1) - B), one_minus_q(2 * n - 1)};
      },
      false);
}

inline QSeries g_ratio(const GradedPoint& g, int order) {
  return divide(fam(Family::g, 1, g, order), fam(Family::g, 0, g, order));
}

inline QSeries G_ratio(const GradedPoint& g, int order) {
  return divide(fam(Family::G, 1, g, order), fam(Family::G, 0, g, order));
}

inline QSeries R_ratio(const Rational& a, int order) {
  const GradedPoint g = graded({a, 0, 0});
  return divide(fam(Family::R, 1, g, order), fam(Family::R, 0, g, order));
}

inline QSeries product_ratio(int order) {
  const QSeries d = pinf(QMonomial(1, 2), order, 4);
  return divide(pinf(QMonomial(1, 1), order, 2), d * d);
}

// (-a)_inf (b)_inf -/+ (a)_inf (-b)_inf for graded a, b
inline std::pair<QSeries, QSeries> entry11_products(const QMonomial& a, const QMonomial& b, int order) {
  const QMonomial na(-a.coef, a.power), nb(-b.coef, b.power);
  const QSeries x = pinf(na, order) * pinf(b, order);
  const QSeries y = pinf(a, order) * pinf(nb, order);
  return {x - y, x + y};
}

// G(s) at a -> 0, summed term by term with lim (-l/a)_k a^k = l^k q^{k(k-1)/2}.
inline QSeries G_limit_a0(int s, const Rational& b, const Rational& l, int order) {
  QSeries total(order);
  for (int k = 0; s * k + k * k <= order; ++k) {
    const int shift = s * k + k * (k + 1) / 2;
    QSeries t = limit_pochhammer_scaled(l, k, order) * QSeries::monomial(1, shift, order);
    const QSeries den = pochhammer_finite(QMonomial(1, 1), k, order) * pochhammer_finite(QMonomial(-b, 1), k, order);
    total += divide(t, den);
  }
  return total;
}

inline std::optional<std::string> no_constraint(const ParamPoint&) { return std::nullopt; }

inline IdentityEntry cf_entry(std::string id, std::string title, Kind kind, CFSpec spec) {
  IdentityEntry e;
  e.id = std::move(id);
  e.title = std::move(title);
  e.kind = kind;
  e.constraint = no_constraint;
  e.cf = std::move(spec);
  return e;
}

inline IdentityEntry plain_entry(std::string id, std::string title, Kind kind, ComparisonBuilder build) {
  IdentityEntry e;
  e.id = std::move(id);
  e.title = std::move(title);
  e.kind = kind;
  e.constraint = no_constraint;
  e.extra = std::move(build);
  return e;
}

inline std::vector<Comparison> link_g_family(const CFrac& source, const QSeries& source_target, const CFrac& dest,
                                             const QSeries& dest_target, int order, int depth) {
  std::vector<Comparison> out;
  compare_elements(out, source, dest, depth, order, true);
  out.push_back(cmp("target", source_target, dest_target));
  return out;
}

inline std::vector<IdentityEntry> build_registry() {
  std::vector<IdentityEntry> reg;

  // ---- continued fractions -------------------------------------------------
  {
    auto e = cf_entry("RR_CF", "Rogers-Ramanujan continued fraction with parameter a", Kind::cf_equals_series_ratio,
                      {[](const ParamPoint& p) { return rr_cf(p.a); },
                       [](const ParamPoint& p, int N) { return R_ratio(p.a, N); }});
    e.conditions = "|q| < 1";
    reg.push_back(e);
  }
  {
    auto e = cf_entry("RR_SPECIAL", "Rogers-Ramanujan continued fraction 1 + q/(1 + q^2/(1 + ...))",
                      Kind::cf_equals_series_ratio,
                      {[](const ParamPoint&) { return rr_special_cf(); },
                       [](const ParamPoint&, int N) { return inverse(R_ratio(1, N)); }});
    e.parameter_free = true;
    e.links.push_back({"RR_CF", "a=1", [](const ParamPoint&, int N, int depth) {
                         std::vector<Comparison> out;
                         const auto x = approximants(rr_special_cf(), depth, N);
                         const auto y = approximants(rr_cf(1), depth, N);
                         for (int n = 1; n <= depth; ++n)
                           out.push_back(cmp("S_" + std::to_string(n) + " reciprocal",
                                             x[static_cast<std::size_t>(n - 1)] * y[static_cast<std::size_t>(n - 1)],
                                             QSeries::one(N)));
                         out.push_back(cmp("target reciprocal", inverse(R_ratio(1, N)) * R_ratio(1, N), QSeries::one(N)));
                         return out;
                       }});
    reg.push_back(e);
  }
  {
    auto e = cf_entry("G_CFRAC_g2", "Ramanujan's fraction for g(b,lq)/g(b,l), denominators 1+bq^n",
                      Kind::cf_equals_series_ratio,
                      {[](const ParamPoint& p) { return g_cfrac2(p.b, p.lambda); },
                       [](const ParamPoint& p, int N) { return g_ratio(graded(p), N); }});
    e.links.push_back({"RR_CF", "b=0, l=a", [](const ParamPoint& p, int N, int depth) {
                         const ParamPoint s{p.a, 0, p.a};
                         auto out = link_g_family(g_cfrac2(0, p.a), g_ratio(graded(s), N), rr_cf(p.a), R_ratio(p.a, N),
                                                  N, depth);
                         for (int sh = 0; sh <= 2; ++sh)
                           out.push_back(cmp("g(" + std::to_string(sh) + ") = R(" + std::to_string(sh) + ")",
                                             fam(Family::g, sh, graded(s), N), fam(Family::R, sh, graded(s), N)));
                         return out;
                       }});
    reg.push_back(e);
  }
  {
    auto e = cf_entry("G_CFRAC_g1", "Ramanujan's fraction for g(b,lq)/g(b,l), interlaced numerators",
                      Kind::cf_equals_series_ratio,
                      {[](const ParamPoint& p) { return g_cfrac1(p.b, p.lambda); },
                       [](const ParamPoint& p, int N) { return g_ratio(graded(p), N); }});
    reg.push_back(e);
  }
  {
    auto e = cf_entry("G_CFRAC_g3", "Ramanujan's fraction for g(b,lq)/g(b,l), denominators 1-b",
                      Kind::cf_equals_series_ratio,
                      {[](const ParamPoint& p) { return g_cfrac3(QMonomial(p.b, 1), p.lambda); },
                       [](const ParamPoint& p, int N) { return g_ratio(graded(p, {0, 1, 0}), N); }});
    e.grading = "b -> b*q";
    e.conditions = "|b/(1-b)^2| < 1/4";
    // Ungraded b: the finite fraction closed by its exact tail
    // w_n = g2(n)/g2(n+1) - (1-b) reproduces the ratio at every depth.
    // Skipped at b = 1, where the ungraded partial denominators vanish.
    e.extra = [](const ParamPoint& p, int N, int depth) {
      std::vector<Comparison> out;
      if (p.b == 1) return out;
      const GradedPoint g = graded(p);
      const CFrac cf = g_cfrac3(QMonomial(p.b), p.lambda);
      const QSeries target = g_ratio(g, N);
      for (int n = 1; n <= depth; ++n) {
        QSeries w = divide(fam(Family::g2, n, g, N), fam(Family::g2, n + 1, g, N));
        w[0] -= 1 - p.b;
        out.push_back(cmp("S_" + std::to_string(n) + "(w_n), ungraded b", modified_approximant(cf, n, w, N), target));
      }
      return out;
    };
    reg.push_back(e);
  }
  {
    auto e = cf_entry("HEINE_CF", "Heine-type fraction for G(aq,b,lq)/G(a,b,l), denominators 1+bq^n",
                      Kind::cf_equals_series_ratio,
                      {[](const ParamPoint& p) { return heine_cf(p.a, p.b, p.lambda); },
                       [](const ParamPoint& p, int N) { return G_ratio(graded(p), N); }});
    e.links.push_back({"G_CFRAC_g2", "a=0", [](const ParamPoint& p, int N, int depth) {
                         const ParamPoint s{0, p.b, p.lambda};
                         return link_g_family(heine_cf(0, p.b, p.lambda), G_ratio(graded(s), N),
                                              g_cfrac2(p.b, p.lambda), g_ratio(graded(s), N), N, depth);
                       }});
    reg.push_back(e);
  }
  {
    auto e = cf_entry("RAMANUJAN_G1", "Ramanujan's fraction for G(aq,b,lq)/G(a,b,l), interlaced numerators",
                      Kind::cf_equals_series_ratio,
                      {[](const ParamPoint& p) { return ramanujan_g1(p.a, p.b, p.lambda); },
                       [](const ParamPoint& p, int N) { return G_ratio(graded(p), N); }});
    e.links.push_back({"G_CFRAC_g1", "a->0", [](const ParamPoint& p, int N, int depth) {
                         std::vector<Comparison> out;
                         compare_elements(out, ramanujan_g1(0, p.b, p.lambda), g_cfrac1(p.b, p.lambda), depth, N, true);
                         const GradedPoint g = graded({0, p.b, p.lambda});
                         for (int s = 0; s <= 1; ++s) {
                           const QSeries lim = G_limit_a0(s, p.b, p.lambda, N);
                           out.push_back(cmp("lim G(" + std::to_string(s) + ") = g(" + std::to_string(s) + ")", lim,
                                             fam(Family::g, s, g, N)));
                           out.push_back(cmp("lim G(" + std::to_string(s) + ") = G(" + std::to_string(s) + ")|a=0",
                                             lim, fam(Family::G, s, g, N)));
                         }
                         return out;
                       }});
    reg.push_back(e);
  }
  {
    auto e = cf_entry("RAMANUJAN_G2", "Ramanujan's fraction for G(aq,b,lq)/G(a,b,l), denominators 1+aq^(n+1)+bq^n",
                      Kind::cf_equals_series_ratio,
                      {[](const ParamPoint& p) { return ramanujan_g2(p.a, p.b, p.lambda); },
                       [](const ParamPoint& p, int N) { return G_ratio(graded(p), N); }});
    e.links.push_back({"G_CFRAC_g2", "a=0", [](const ParamPoint& p, int N, int depth) {
                         const ParamPoint s{0, p.b, p.lambda};
                         return link_g_family(ramanujan_g2(0, p.b, p.lambda), G_ratio(graded(s), N),
                                              g_cfrac2(p.b, p.lambda), g_ratio(graded(s), N), N, depth);
                       }});
    reg.push_back(e);
  }
  {
    auto e = cf_entry("HIRSCHHORN", "Hirschhorn's fraction for G(aq,b,lq)/G(a,b,l)", Kind::cf_equals_series_ratio,
                      {[](const ParamPoint& p) { return hirschhorn(QMonomial(p.a), p.b, p.lambda); },
                       [](const ParamPoint& p, int N) { return G_ratio(graded(p), N); }});
    e.conditions = "|aq/(1-aq)^2| < 1/4";
    // With b=0 and a -> b/q the elements become those of G_CFRAC_g3 at
    // ungraded b. The leading terms differ (1 against 1-b), so the tails
    // are compared: 1/H - 1 = 1/g3 - (1-b).
    e.links.push_back({"G_CFRAC_g3", "b=0, a->b/q", [](const ParamPoint& p, int N, int depth) {
                         // a = b/q = -1/q puts (1 - aq) = 0 into G(a,0,l)
                         if (p.b == -1) throw PoleAtParameter("b = -1 makes 1 - aq vanish after a -> b/q");
                         std::vector<Comparison> out;
                         const CFrac h = hirschhorn(QMonomial(p.b, -1), 0, p.lambda);
                         const CFrac g3 = g_cfrac3(QMonomial(p.b), p.lambda);
                         compare_elements(out, h, g3, depth, N, false);
                         const GradedPoint hg{QMonomial(p.b, -1), QMonomial(0), QMonomial(p.lambda)};
                         QSeries th = inverse(G_ratio(hg, N));
                         th[0] -= 1;
                         QSeries tg = inverse(g_ratio(graded({0, p.b, p.lambda}), N));
                         tg[0] -= 1 - p.b;
                         out.push_back(cmp("tail value", th, tg));
                         return out;
                       }});
    reg.push_back(e);
  }
  {
    auto e = cf_entry("HEINE_CF_A", "Heine-type fraction for G(aq,b,lq)/G(a,b,l), denominators 1+aq^(n+1)",
                      Kind::cf_equals_series_ratio,
                      {[](const ParamPoint& p) { return heine_cf_a(p.a, p.b, p.lambda); },
                       [](const ParamPoint& p, int N) { return G_ratio(graded(p), N); }});
    e.conditions = "|l/a| < 1";
    e.links.push_back({"G_CFRAC_g1", "a=0", [](const ParamPoint& p, int N, int depth) {
                         const ParamPoint s{0, p.b, p.lambda};
                         return link_g_family(heine_cf_a(0, p.b, p.lambda), G_ratio(graded(s), N),
                                              g_cfrac1(p.b, p.lambda), g_ratio(graded(s), N), N, depth);
                       }});
    reg.push_back(e);
  }
  {
    auto e = cf_entry("EISENSTEIN", "Eisenstein's fraction for sum (-a)^k q^(k(k+1)/2)", Kind::cf_equals_series_ratio,
                      {[](const ParamPoint& p) { return eisenstein_cf(p.a); },
                       [](const ParamPoint& p, int N) { return fam(Family::Eisenstein, 0, graded(p), N); }});
    e.links.push_back({"G_CFRAC_g1", "l=a, b=-a", [](const ParamPoint& p, int N, int depth) {
                         const ParamPoint s{p.a, -p.a, p.a};
                         return link_g_family(eisenstein_cf(p.a), fam(Family::Eisenstein, 0, graded(p), N),
                                              g_cfrac1(s.b, s.lambda), g_ratio(graded(s), N), N, depth);
                       }});
    reg.push_back(e);
  }
  {
    auto e = cf_entry("PROD_RATIO", "Fraction for (q;q^2)_inf / (q^2;q^4)_inf^2", Kind::cf_equals_product_ratio,
                      {[](const ParamPoint&) { return g_cfrac1(1, 1); },
                       [](const ParamPoint&, int N) { return product_ratio(N); }});
    e.parameter_free = true;
    e.default_depth = 12;
    e.links.push_back({"G_CFRAC_g1", "b=1, l=1", [](const ParamPoint&, int N, int depth) {
                         return link_g_family(g_cfrac1(1, 1), product_ratio(N), g_cfrac1(1, 1),
                                              g_ratio(graded({0, 1, 1}), N), N, depth);
                       }});
    reg.push_back(e);
  }
  {
    auto e = cf_entry("ENTRY11", "Ramanujan's fraction for the ratio of (-a)(b) -/+ (a)(-b) products",
                      Kind::cf_equals_product_ratio,
                      {[](const ParamPoint& p) { return entry11_cf(QMonomial(p.a, 1), QMonomial(p.b, 1)); },
                       [](const ParamPoint& p, int N) {
                         auto [num, den] = entry11_products(QMonomial(p.a, 1), QMonomial(p.b, 1), N);
                         return divide(num, den);
                       }});
    e.grading = "a -> a*q, b -> b*q";
    e.conditions = "|a| < 1, |b| < 1";
    e.constraint = [](const ParamPoint& p) -> std::optional<std::string> {
      if (is_zero(p.a)) return "a = 0";
      if (p.a == p.b) return "a = b makes the first partial numerator vanish";
      return std::nullopt;
    };
    reg.push_back(e);
  }

  // ---- sum transformations -------------------------------------------------
  {
    auto e = plain_entry(
        "ENTRY11_SUMRATIO", "Odd/even split of sum (b/a)_m a^m/(q)_m and its C(s) form", Kind::series_transformation,
        [](const ParamPoint& p, int N, int) {
          const QMonomial A(p.a, 1), B(p.b, 1);
          auto ratio = [&](int k) { return TermRatio{L(A) - L(B) * qp(k), one_minus_q(k + 1)}; };
          const QSeries odd = hypergeometric_sum(ratio, N, [](int k) { return k % 2 == 1; });
          const QSeries even = hypergeometric_sum(ratio, N, [](int k) { return k % 2 == 0; });
          auto [num, den] = entry11_products(A, B, N);
          const GradedPoint g{A, B, QMonomial(0)};
          const QSeries c1 = fam(Family::C, 1, g, N), c2 = fam(Family::C, 2, g, N);
          std::vector<Comparison> out;
          out.push_back(cmp("odd * (sum of products) = even * (difference of products)", odd * den, even * num));
          out.push_back(cmp("odd = (a-b)/(1-q) C(1)", odd, divide(ser(L(A) - L(B), N) * c1, ser(one_minus_q(1), N))));
          const QSeries rhs = ser(one_minus_q(1), N) * c1 +
                              divide(ser((L(A) - L(B) * qp(1)) * (L(A) * qp(1) - L(B)), N), ser(one_minus_q(3), N)) * c2;
          out.push_back(cmp("(1-q) even = (1-q) C(1) + (a-bq)(aq-b)/(1-q^3) C(2)", ser(one_minus_q(1), N) * even, rhs));
          return out;
        });
    e.grading = "a -> a*q, b -> b*q";
    e.constraint = [](const ParamPoint& p) -> std::optional<std::string> {
      if (is_zero(p.a)) return "a = 0";
      return std::nullopt;
    };
    reg.push_back(e);
  }
  {
    // c := l, d := a*b (ungraded)
    auto e = plain_entry(
        "ENTRY8", "Four-parameter transformation of sum (b/a)_k (c)_k a^k/((d)_k (q)_k)", Kind::series_transformation,
        [](const ParamPoint& p, int N, int) {
          const QMonomial A(p.a, 1), B(p.b, 1);
          const Rational c = p.lambda, d = p.a * p.b;
          const QSeries s1 = hypergeometric_sum(
              [&](int k) {
                return TermRatio{(L(A) - L(B) * qp(k)) * (L(1) - mq(c, k)), (L(1) - mq(d, k)) * one_minus_q(k + 1)};
              },
              N);
          const QSeries s2 = hypergeometric_sum(
              [&](int k) {
                return TermRatio{-(L(A) - L(B) * qp(k)) * (L(c) - mq(d, k)) * qp(k),
                                 (L(1) - L(B) * qp(k)) * (L(1) - mq(d, k)) * one_minus_q(k + 1)};
              },
              N);
          return std::vector<Comparison>{cmp("(a)_inf S1 = (b)_inf S2", pinf(A, N) * s1, pinf(B, N) * s2)};
        });
    e.grading = "a -> a*q, b -> b*q; c = l, d = a*b";
    e.conditions = "|a| < 1";
    e.constraint = [](const ParamPoint& p) -> std::optional<std::string> {
      if (p.a * p.b == 1) return "d = a*b = 1 makes (d;q)_k vanish";
      return std::nullopt;
    };
    reg.push_back(e);
  }
  {
    auto e = plain_entry(
        "ENTRY8_D0", "d = 0 case of the four-parameter transformation, and its two G specialisations",
        Kind::series_transformation, [](const ParamPoint& p, int N, int) {
          const Rational a = p.a, b = p.b, l = p.lambda;
          auto lhs = [&](const QMonomial& C) {
            return hypergeometric_sum(
                [&](int k) {
                  return TermRatio{(L(a) + mq(l, k)) * mq(b / l, k + 1) * L(C),
                                   (L(1) + mq(b, k + 1)) * one_minus_q(k + 1)};
                },
                N);
          };
          auto rhs = [&](const QMonomial& C) {
            return hypergeometric_sum(
                [&](int k) {
                  return TermRatio{(L(a) + mq(l, k)) * (L(1) + L(C) * qp(k)) * mq(b / l, 1), one_minus_q(k + 1)};
                },
                N);
          };
          std::vector<Comparison> out;
          const QSeries left = pinf(QMonomial(-b, 1), N), right = pinf(QMonomial(a * b / l, 1), N);
          const std::pair<QMonomial, std::string> cases[] = {
              {QMonomial(l), "C=l"}, {QMonomial(l / b, 1), "C=lq/b"}, {QMonomial(l / b), "C=l/b"}};
          for (const auto& [C, name] : cases) out.push_back(cmp(name + ": transformation", left * lhs(C), right * rhs(C)));
          const GradedPoint g = graded(p);
          out.push_back(cmp("C=lq/b: sum is G(aq,b,lq)", lhs(QMonomial(l / b, 1)), fam(Family::G, 1, g, N)));
          out.push_back(cmp("C=l/b: sum is G(a,b,l)", lhs(QMonomial(l / b)), fam(Family::G, 0, g, N)));
          return out;
        });
    e.constraint = [](const ParamPoint& p) -> std::optional<std::string> {
      if (is_zero(p.b)) return "b = 0 (the specialisations use C = l/b)";
      if (is_zero(p.lambda)) return "l = 0 (the sums carry (b/l)^k)";
      return std::nullopt;
    };
    reg.push_back(e);
  }
  {
    // c := l, d := a*b, all four graded
    auto e = plain_entry(
        "ENTRY6", "Symmetric four-parameter transformation", Kind::series_transformation,
        [](const ParamPoint& p, int N, int) {
          const QMonomial A(p.a, 1), B(p.b, 1), C(p.lambda, 1), D(p.a * p.b, 1);
          const QSeries s1 = hypergeometric_sum(
              [&](int k) {
                return TermRatio{(L(A) - L(B) * qp(k)) * (L(1) - L(C) * qp(k)),
                                 (L(1) - L(D) * qp(k)) * one_minus_q(k + 1)};
              },
              N);
          const QSeries s2 = hypergeometric_sum(
              [&](int k) {
                return TermRatio{(L(1) - L(A) * qp(k)) * (L(C) - L(D) * qp(k)),
                                 (L(1) - L(B) * qp(k)) * one_minus_q(k + 1)};
              },
              N);
          return std::vector<Comparison>{cmp("(a)_inf (d)_inf S1 = (c)_inf (b)_inf S2", pinf(A, N) * pinf(D, N) * s1,
                                             pinf(C, N) * pinf(B, N) * s2)};
        });
    e.grading = "a, b, c = l, d = a*b -> x*q";
    reg.push_back(e);
  }
  {
    auto e = plain_entry(
        "QBIN", "q-binomial theorem (Rothe)", Kind::series_transformation, [](const ParamPoint& p, int N, int) {
          auto sum = [N](const QMonomial& A, const QMonomial& B) {
            return hypergeometric_sum([&](int k) { return TermRatio{L(A) + L(B) * qp(k), one_minus_q(k + 1)}; }, N);
          };
          const QMonomial A(p.a, 1), B(p.b, 1), Aq(p.a, 2), Bq(p.b, 2);
          const QSeries s = sum(A, B), sq = sum(Aq, Bq);
          std::vector<Comparison> out;
          out.push_back(cmp("(a)_inf S = (-b)_inf", pinf(A, N) * s, pinf(QMonomial(-p.b, 1), N)));
          out.push_back(cmp("sum side: (1-a) F(a,b) = (1+b) F(aq,bq)", ser(L(1) - L(A), N) * s, ser(L(1) + L(B), N) * sq));
          out.push_back(cmp("product side: (1-a) (-b)_inf (aq)_inf = (1+b) (-bq)_inf (a)_inf",
                            ser(L(1) - L(A), N) * pinf(QMonomial(-p.b, 1), N) * pinf(Aq, N),
                            ser(L(1) + L(B), N) * pinf(QMonomial(-p.b, 2), N) * pinf(A, N)));
          return out;
        });
    e.grading = "a -> a*q, b -> b*q";
    e.conditions = "|a| < 1";
    reg.push_back(e);
  }
  {
    auto e = plain_entry("GFRAC_SUMS2", "G(aq,b,lq)/G(a,b,l) as a ratio of G1A/G1B sums", Kind::series_transformation,
                         [](const ParamPoint& p, int N, int) {
                           const GradedPoint g = graded(p);
                           return std::vector<Comparison>{
                               cmp("G(1) G1A(0) = G(0) G1B(0)", fam(Family::G, 1, g, N) * fam(Family::G1A, 0, g, N),
                                   fam(Family::G, 0, g, N) * fam(Family::G1B, 0, g, N))};
                         });
    reg.push_back(e);
  }
  {
    auto e = plain_entry(
        "GFRAC5_SUMS", "G(aq,b,lq)/G(a,b,l) as a ratio of (-l/a)^k sums", Kind::series_transformation,
        [](const ParamPoint& p, int N, int) {
          const GradedPoint g = graded(p, {0, 0, 1});
          const L la(QMonomial(p.lambda / p.a, 1));
          auto s5 = [&](int extra) {
            return hypergeometric_sum(
                [&](int k) {
                  return TermRatio{mq(p.b, k + 1) - la, one_minus_q(k + 1) * (L(1) + mq(p.a, k + 1 + extra))};
                },
                N);
          };
          return std::vector<Comparison>{cmp("G(1) (1+aq) Den = G(0) Num",
                                             fam(Family::G, 1, g, N) * ser(L(1) + mq(p.a, 1), N) * s5(0),
                                             fam(Family::G, 0, g, N) * s5(1))};
        });
    e.grading = "l -> l*q";
    e.conditions = "|l/a| < 1";
    e.constraint = [](const ParamPoint& p) -> std::optional<std::string> {
      if (is_zero(p.a)) return "a = 0 (the sums carry (-l/a)^k)";
      return std::nullopt;
    };
    reg.push_back(e);
  }
  {
    auto e = plain_entry("gFRAC_SUMS2", "g(b,lq)/g(b,l) as a ratio of g2 sums", Kind::series_transformation,
                         [](const ParamPoint& p, int N, int) {
                           const GradedPoint g = graded(p);
                           return std::vector<Comparison>{
                               cmp("g(1) g2(0) = g(0) g2(1)", fam(Family::g, 1, g, N) * fam(Family::g2, 0, g, N),
                                   fam(Family::g, 0, g, N) * fam(Family::g2, 1, g, N))};
                         });
    reg.push_back(e);
  }

  // ---- three-term recurrences ---------------------------------------------
  {
    auto e = plain_entry("REC_RR", "R(s) = R(s+1) + a q^(s+1) R(s+2)", Kind::recurrence,
                         [](const ParamPoint& p, int N, int) {
                           const GradedPoint g = graded(p);
                           std::vector<Comparison> out;
                           for (int s = 0; s <= 6; ++s)
                             out.push_back(three_term("s=" + std::to_string(s), fam(Family::R, s, g, N),
                                                      fam(Family::R, s + 1, g, N), fam(Family::R, s + 2, g, N),
                                                      QSeries::one(N), ser(mq(p.a, s + 1), N), N));
                           return out;
                         });
    reg.push_back(e);
  }
  {
    auto e = plain_entry(
        "REC_G1", "g1(s) = g1(s+1) + l q^(s+1)/((1+bq^s)(1+bq^(s+1))) g1(s+2)", Kind::recurrence,
        [](const ParamPoint& p, int N, int) {
          const GradedPoint g = graded(p);
          std::vector<Comparison> out;
          for (int s = 0; s <= 6; ++s) {
            const QSeries c2 = divide(ser(mq(p.lambda, s + 1), N), ser((L(1) + mq(p.b, s)) * (L(1) + mq(p.b, s + 1)), N));
            out.push_back(three_term("s=" + std::to_string(s), fam(Family::g1, s, g, N), fam(Family::g1, s + 1, g, N),
                                     fam(Family::g1, s + 2, g, N), QSeries::one(N), c2, N));
          }
          return out;
        });
    e.constraint = [](const ParamPoint& p) -> std::optional<std::string> {
      if (p.b == -1) return "b = -1 makes 1 + b q^0 vanish";
      return std::nullopt;
    };
    reg.push_back(e);
  }
  {
    auto e = plain_entry("REC_G2", "g2(s) = (1-b) g2(s+1) + (b + l q^(s+1)) g2(s+2)", Kind::recurrence,
                         [](const ParamPoint& p, int N, int) {
                           const GradedPoint g = graded(p);
                           std::vector<Comparison> out;
                           for (int s = 0; s <= 6; ++s)
                             out.push_back(three_term("s=" + std::to_string(s), fam(Family::g2, s, g, N),
                                                      fam(Family::g2, s + 1, g, N), fam(Family::g2, s + 2, g, N),
                                                      QSeries::constant(1 - p.b, N),
                                                      ser(L(p.b) + mq(p.lambda, s + 1), N), N));
                           return out;
                         });
    reg.push_back(e);
  }
  {
    auto e = plain_entry(
        "REC_GG2", "G2(s) = c1 G2(s+1) + c2 G2(s+2) with denominators 1+aq^(s+1), 1+aq^(s+2)", Kind::recurrence,
        [](const ParamPoint& p, int N, int) {
          const GradedPoint g = graded(p, {0, 0, 1});
          std::vector<Comparison> out;
          for (int s = 0; s <= 6; ++s) {
            const QSeries d1 = ser(L(1) + mq(p.a, s + 1), N), d2 = ser(L(1) + mq(p.a, s + 2), N);
            const QSeries c1 = divide(ser(L(1) + mq(p.a, s + 1) + mq(p.b, s), N), d1);
            const QSeries c2 =
                divide(ser(L(g.lambda) * qp(s + 1) - mq(p.a * p.b, 2 * s + 2), N), d1 * d2);
            out.push_back(three_term("s=" + std::to_string(s), fam(Family::G2, s, g, N), fam(Family::G2, s + 1, g, N),
                                     fam(Family::G2, s + 2, g, N), c1, c2, N));
          }
          return out;
        });
    e.grading = "l -> l*q";
    reg.push_back(e);
  }
  {
    auto e = plain_entry(
        "REC_G1AB", "Interlaced recurrences of G1A(s) and G1B(s)", Kind::recurrence,
        [](const ParamPoint& p, int N, int) {
          const GradedPoint g = graded(p);
          std::vector<Comparison> out;
          for (int s = 0; s <= 6; ++s) {
            const auto S = std::to_string(s);
            out.push_back(three_term("A, s=" + S, fam(Family::G1A, s, g, N), fam(Family::G1B, s, g, N),
                                     fam(Family::G1A, s + 1, g, N), QSeries::one(N),
                                     ser(mq(p.a, s + 1) + mq(p.lambda, 2 * s + 1), N), N));
            out.push_back(three_term("B, s=" + S, fam(Family::G1B, s, g, N), fam(Family::G1A, s + 1, g, N),
                                     fam(Family::G1B, s + 1, g, N), QSeries::one(N),
                                     ser(mq(p.b, s + 1) + mq(p.lambda, 2 * s + 2), N), N));
          }
          return out;
        });
    reg.push_back(e);
  }
  {
    auto e = plain_entry(
        "REC_C", "C(s) = C(s+1) + q^s (a-bq^(s+1))(aq^(s+1)-b)/((1-q^(2s+1))(1-q^(2s+3))) C(s+2)", Kind::recurrence,
        [](const ParamPoint& p, int N, int) {
          const GradedPoint g = graded(p, {1, 1, 0});
          const L A(g.a), B(g.b);
          std::vector<Comparison> out;
          for (int s = 1; s <= 6; ++s) {
            const QSeries c2 =
                divide(ser(qp(s) * (A - B * qp(s + 1)) * (A * qp(s + 1) - B), N),
                       ser(one_minus_q(2 * s + 1) * one_minus_q(2 * s + 3), N));
            out.push_back(three_term("s=" + std::to_string(s), fam(Family::C, s, g, N), fam(Family::C, s + 1, g, N),
                                     fam(Family::C, s + 2, g, N), QSeries::one(N), c2, N));
          }
          return out;
        });
    e.grading = "a -> a*q, b -> b*q";
    reg.push_back(e);
  }

  // ---- products -------------------------------------------------------------
  {
    auto e = plain_entry(
        "POCH_IDS", "Infinite-product identities and the a -> 0 limit of (-l/a)_k a^k", Kind::product_identity,
        [](const ParamPoint& p, int N, int) {
          std::vector<Comparison> out;
          out.push_back(cmp("(q;q)(-q;q) = (q^2;q^2)", pinf(QMonomial(1, 1), N) * pinf(QMonomial(-1, 1), N),
                            pinf(QMonomial(1, 2), N, 2)));
          out.push_back(cmp("(-q^2;q^2)(q^2;q^4) = 1", pinf(QMonomial(-1, 2), N, 2) * pinf(QMonomial(1, 2), N, 4),
                            QSeries::one(N)));
          out.push_back(cmp("(-q;q^2)(q;q^2) = (q^2;q^4)", pinf(QMonomial(-1, 1), N, 2) * pinf(QMonomial(1, 1), N, 2),
                            pinf(QMonomial(1, 2), N, 4)));
          // (-l/a)_k a^k is a polynomial in a; its value at a = 0 is read off by
          // Lagrange interpolation through k+1 nonzero points.
          for (int k = 0; k <= 6; ++k) {
            QSeries at0(N);
            for (int i = 0; i <= k; ++i) {
              const Rational ai = p.a * (i + 1);
              Rational weight(1);
              for (int j = 0; j <= k; ++j)
                if (j != i) {
                  const Rational aj = p.a * (j + 1);
                  weight *= aj / (aj - ai);
                }
              Rational scale(1);
              for (int j = 0; j < k; ++j) scale *= ai;
              at0 += pochhammer_finite(QMonomial(-p.lambda / ai), k, N) * Rational(scale * weight);
            }
            out.push_back(cmp("lim (-l/a)_" + std::to_string(k) + " a^" + std::to_string(k), at0,
                              limit_pochhammer_scaled(p.lambda, k, N)));
          }
          return out;
        });
    e.constraint = [](const ParamPoint& p) -> std::optional<std::string> {
      if (is_zero(p.a)) return "interpolation nodes need a != 0";
      return std::nullopt;
    };
    e.default_order = 60;
    reg.push_back(e);
  }
  return reg;
}

}  // namespace catalog_detail

inline const std::vector<IdentityEntry>& register_all() {
  static const std::vector<IdentityEntry> reg = catalog_detail::build_registry();
  return reg;
}

inline const IdentityEntry* lookup(std::string_view id) {
  for (const auto& e : register_all())
    if (e.id == id) return &e;
  return nullptr;
}

// ---- reports ----------------------------------------------------------------

enum class Status { pass, fail, skipped };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::skipped: return "skipped";
  }
  return "?";
}

inline Status parse_status(const std::string& s) {
  if (s == "pass") return Status::pass;
  if (s == "fail") return Status::fail;
  if (s == "skipped") return Status::skipped;
  throw ParseError("unknown status '" + s + "'");
}

struct DumpRow {
  int power = 0;
  std::string lhs;
  std::string rhs;
  friend bool operator==(const DumpRow&, const DumpRow&) = default;
};

struct IdentityReport {
  std::string id;
  std::optional<ParamPoint> params;
  int order = 0;
  int depth = 0;
  Status status = Status::pass;
  std::optional<int> first_mismatch_power;
  std::string comparison;  // label of the first failing comparison
  std::string reason;      // skip reason or error text
  std::string note;
  std::vector<DumpRow> dump;
  double elapsed_ms = 0;

  friend bool operator==(const IdentityReport&, const IdentityReport&) = default;
};

struct Summary {
  int pass = 0;
  int fail = 0;
  int skip = 0;
  friend bool operator==(const Summary&, const Summary&) = default;
};

struct RunInfo {
  std::uint64_t seed = 0;
  int points = 0;
  int order = 0;
  int depth = 0;
  friend bool operator==(const RunInfo&, const RunInfo&) = default;
};

struct RunReport {
  RunInfo run;
  std::vector<IdentityReport> reports;
  Summary summary;
  friend bool operator==(const RunReport&, const RunReport&) = default;
};

inline Summary summarize(const std::vector<IdentityReport>& reports) {
  Summary s;
  for (const auto& r : reports) {
    if (r.status == Status::pass) ++s.pass;
    if (r.status == Status::fail) ++s.fail;
    if (r.status == Status::skipped) ++s.skip;
  }
  return s;
}

namespace catalog_detail {

inline IdentityReport run_comparisons(IdentityReport rep, const std::function<std::vector<Comparison>()>& build) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const std::vector<Comparison> cs = build();
    rep.status = Status::pass;
    for (const auto& c : cs) {
      const int through = std::min({c.through, c.lhs.order(), c.rhs.order()});
      const auto mm = first_mismatch(c.lhs.truncated(through), c.rhs.truncated(through));
      if (!mm) continue;
      rep.status = Status::fail;
      rep.first_mismatch_power = *mm;
      rep.comparison = c.label;
      for (int i = 0; i <= std::min(through, *mm + 5); ++i)
        rep.dump.push_back({i, c.lhs[i].get_str(), c.rhs[i].get_str()});
      break;
    }
  } catch (const PoleAtParameter& e) {
    rep.status = Status::skipped;
    rep.reason = e.what();
  } catch (const QcfError& e) {
    // An identity that cannot even be evaluated fails at the first coefficient.
    rep.status = Status::fail;
    rep.first_mismatch_power = 0;
    rep.reason = e.what();
  }
  rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace catalog_detail

/// The main comparison of a continued-fraction entry: S_depth(0) against the
/// target through the contact bound of the fraction's elements.
inline Comparison cf_comparison(const IdentityEntry& e, const ParamPoint& p, int order, int depth,
                                const Perturbation& perturb = {}) {
  CFrac cf = e.cf->fraction(p);
  if (perturb.active()) cf = perturbed(cf, perturb.element, perturb.delta);
  const int bound = contact_bound(cf, depth, order);
  return {"S_" + std::to_string(depth) + "(0) vs target", approximant(cf, depth, order), e.cf->target(p, order),
          std::min(order, bound - 1)};
}

inline IdentityReport verify(const IdentityEntry& e, const ParamPoint& p, int order, int depth,
                             const Perturbation& perturb = {}) {
  IdentityReport rep;
  rep.id = e.id;
  if (!e.parameter_free) rep.params = p;
  rep.order = order;
  rep.depth = depth;
  if (!e.parameter_free) {
    if (auto why = e.constraint(p)) {
      rep.status = Status::skipped;
      rep.reason = *why;
      return rep;
    }
  }
  return catalog_detail::run_comparisons(rep, [&] {
    std::vector<Comparison> cs;
    if (e.cf) cs.push_back(cf_comparison(e, p, order, depth, perturb));
    if (e.extra) {
      auto more = e.extra(p, order, depth);
      cs.insert(cs.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    }
    return cs;
  });
}

inline IdentityReport verify(std::string_view id, const ParamPoint& p, int order, int depth,
                             const Perturbation& perturb = {}) {
  const IdentityEntry* e = lookup(id);
  if (!e) throw QcfError("unknown identity '" + std::string(id) + "'");
  return verify(*e, p, order, depth, perturb);
}

inline std::string link_id(const IdentityEntry& e, const ReductionLink& l) { return e.id + "->" + l.target_id; }

inline IdentityReport check_reduction(const IdentityEntry& e, const ReductionLink& link, const ParamPoint& p,
                                      int order, int depth) {
  IdentityReport rep;
  rep.id = link_id(e, link);
  if (!e.parameter_free) rep.params = p;
  rep.order = order;
  rep.depth = depth;
  rep.note = link.substitution;
  return catalog_detail::run_comparisons(rep, [&] { return link.check(p, order, depth); });
}

/// Looks up the link from id_a to id_b and checks it at p.
inline IdentityReport check_reduction(std::string_view id_a, std::string_view id_b, const ParamPoint& p, int order,
                                      int depth) {
  const IdentityEntry* e = lookup(id_a);
  if (!e) throw QcfError("unknown identity '" + std::string(id_a) + "'");
  for (const auto& l : e->links)
    if (l.target_id == id_b) return check_reduction(*e, l, p, order, depth);
  throw QcfError("no reduction link " + std::string(id_a) + "->" + std::string(id_b));
}

/// Runs every entry at `points` sampled points plus all reduction links.
/// Parameter-free entries run once. An entry that fails at some points and
/// passes at others is re-run at 5 fresh points and flagged; the original
/// failure is kept.
inline RunReport verify_all(const std::vector<IdentityEntry>& registry, std::uint64_t seed, int points, int order,
                            int depth, const Perturbation& perturb = {}, unsigned threads = 0) {
  if (points < 1) throw QcfError("verify_all needs points >= 1");
  ParamStream stream(seed);
  std::vector<ParamPoint> pts;
  for (int i = 0; i < points; ++i) pts.push_back(stream.next());

  struct Task {
    std::string key;
    int seq;
    std::function<IdentityReport()> run;
  };
  std::vector<Task> tasks;
  auto add_tasks = [&](const std::vector<ParamPoint>& at, int seq0) {
    for (const auto& e : registry) {
      const std::size_t n = e.parameter_free ? 1 : at.size();
      for (std::size_t i = 0; i < n; ++i) {
        const ParamPoint p = at[i];
        const int seq = seq0 + static_cast<int>(i);
        tasks.push_back({e.id, seq, [&e, p, order, depth, perturb] { return verify(e, p, order, depth, perturb); }});
        for (const auto& l : e.links)
          tasks.push_back({link_id(e, l), seq, [&e, &l, p, order, depth] { return check_reduction(e, l, p, order, depth); }});
      }
    }
  };
  auto run_tasks = [&](std::size_t from) {
    std::vector<IdentityReport> out(tasks.size() - from);
    std::atomic<std::size_t> next{from};
    unsigned nthreads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = static_cast<unsigned>(std::min<std::size_t>(nthreads, out.size()));
    auto worker = [&] {
      for (std::size_t i = next++; i < tasks.size(); i = next++) out[i - from] = tasks[i].run();
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
  };

  add_tasks(pts, 0);
  std::vector<IdentityReport> reports = run_tasks(0);
  std::vector<int> seqs;
  for (const auto& t : tasks) seqs.push_back(t.seq);

  // Schwartz-Zippel escalation
  std::vector<std::string> mixed;
  for (const auto& e : registry) {
    if (e.parameter_free) continue;
    bool any_pass = false, any_fail = false;
    for (const auto& r : reports)
      if (r.id == e.id) {
        any_pass |= r.status == Status::pass;
        any_fail |= r.status == Status::fail;
      }
    if (any_pass && any_fail) mixed.push_back(e.id);
  }
  if (!mixed.empty()) {
    std::vector<ParamPoint> fresh;
    for (int i = 0; i < 5; ++i) fresh.push_back(stream.next());
    const std::size_t from = tasks.size();
    for (const auto& id : mixed) {
      const IdentityEntry& e =
          *std::find_if(registry.begin(), registry.end(), [&](const IdentityEntry& x) { return x.id == id; });
      for (std::size_t i = 0; i < fresh.size(); ++i) {
        const ParamPoint p = fresh[i];
        tasks.push_back({e.id, points + static_cast<int>(i),
                         [&e, p, order, depth, perturb] { return verify(e, p, order, depth, perturb); }});
      }
    }
    auto extra = run_tasks(from);
    for (auto& r : extra) r.note = "escalation point";
    for (auto& r : reports)
      if (r.status == Status::fail && std::find(mixed.begin(), mixed.end(), r.id) != mixed.end())
        r.note = "suspected accidental cancellation: passes at other points";
    for (std::size_t i = from; i < tasks.size(); ++i) seqs.push_back(tasks[i].seq);
    reports.insert(reports.end(), extra.begin(), extra.end());
  }

  std::vector<std::size_t> idx(reports.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    if (reports[x].id != reports[y].id) return reports[x].id < reports[y].id;
    return seqs[x] < seqs[y];
  });
  RunReport rr;
  rr.run = {seed, points, order, depth};
  for (std::size_t i : idx) rr.reports.push_back(reports[i]);
  rr.summary = summarize(rr.reports);
  return rr;
}

inline RunReport verify_all(std::uint64_t seed, int points, int order, int depth, const Perturbation& perturb = {},
                            unsigned threads = 0) {
  return verify_all(register_all(), seed, points, order, depth, perturb, threads);
}

// ---- JSON / TSV ---------------------------------------------------------------

inline nlohmann::json to_json(const IdentityReport& r, bool timing = false) {
  nlohmann::json j;
  j["id"] = r.id;
  if (r.params)
    j["params"] = {{"a", r.params->a.get_str()}, {"b", r.params->b.get_str()}, {"l", r.params->lambda.get_str()}};
  else
    j["params"] = nullptr;
  j["order"] = r.order;
  j["depth"] = r.depth;
  j["status"] = to_string(r.status);
  j["first_mismatch_power"] = r.first_mismatch_power ? nlohmann::json(*r.first_mismatch_power) : nlohmann::json(nullptr);
  if (!r.comparison.empty()) j["comparison"] = r.comparison;
  if (!r.reason.empty()) j["reason"] = r.reason;
  if (!r.note.empty()) j["note"] = r.note;
  if (!r.dump.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& d : r.dump) rows.push_back({d.power, d.lhs, d.rhs});
    j["dump"] = rows;
  }
  if (timing) j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

inline IdentityReport report_from_json(const nlohmann::json& j) {
  IdentityReport r;
  r.id = j.at("id").get<std::string>();
  if (!j.at("params").is_null()) {
    const auto& p = j.at("params");
    r.params = ParamPoint{parse_rational(p.at("a").get<std::string>()), parse_rational(p.at("b").get<std::string>()),
                          parse_rational(p.at("l").get<std::string>())};
  }
  r.order = j.at("order").get<int>();
  r.depth = j.at("depth").get<int>();
  r.status = parse_status(j.at("status").get<std::string>());
  if (!j.at("first_mismatch_power").is_null()) r.first_mismatch_power = j.at("first_mismatch_power").get<int>();
  r.comparison = j.value("comparison", "");
  r.reason = j.value("reason", "");
  r.note = j.value("note", "");
  if (j.contains("dump"))
    for (const auto& row : j.at("dump"))
      r.dump.push_back({row.at(0).get<int>(), row.at(1).get<std::string>(), row.at(2).get<std::string>()});
  r.elapsed_ms = j.value("elapsed_ms", 0.0);
  return r;
}

inline nlohmann::json to_json(const RunReport& rr, bool timing = false) {
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& r : rr.reports) reports.push_back(to_json(r, timing));
  return {{"run", {{"seed", rr.run.seed}, {"points", rr.run.points}, {"order", rr.run.order}, {"depth", rr.run.depth}}},
          {"reports", reports},
          {"summary", {{"pass", rr.summary.pass}, {"fail", rr.summary.fail}, {"skip", rr.summary.skip}}}};
}

inline RunReport run_report_from_json(const nlohmann::json& j) {
  RunReport rr;
  const auto& run = j.at("run");
  rr.run = {run.at("seed").get<std::uint64_t>(), run.at("points").get<int>(), run.at("order").get<int>(),
            run.at("depth").get<int>()};
  for (const auto& r : j.at("reports")) rr.reports.push_back(report_from_json(r));
  const auto& s = j.at("summary");
  rr.summary = {s.at("pass").get<int>(), s.at("fail").get<int>(), s.at("skip").get<int>()};
  return rr;
}

inline std::string params_text(const std::optional<ParamPoint>& p) { return p ? to_string(*p) : "-"; }

inline std::string to_tsv(const RunReport& rr) {
  std::string out = "id\tparams\torder\tdepth\tstatus\tfirst_mismatch_power\tcomparison\n";
  for (const auto& r : rr.reports) {
    out += r.id + "\t" + params_text(r.params) + "\t" + std::to_string(r.order) + "\t" + std::to_string(r.depth) + "\t" +
           to_string(r.status) + "\t" + (r.first_mismatch_power ? std::to_string(*r.first_mismatch_power) : "") + "\t" +
           r.comparison + "\n";
  }
  for (const auto& r : rr.reports) {
    if (r.status != Status::fail || r.dump.empty()) continue;
    out += "\n# " + r.id + " " + params_text(r.params) + ": " + r.comparison + "\npower\tlhs\trhs\n";
    for (const auto& d : r.dump) out += std::to_string(d.power) + "\t" + d.lhs + "\t" + d.rhs + "\n";
  }
  return out;
}

}  // namespace qcf
