#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qcf/qseries.hpp"

namespace qcf {

class FormallyDivergentSum : public QcfError {
 public:
  using QcfError::QcfError;
};

class PoleAtParameter : public QcfError {
 public:
  using QcfError::QcfError;
};

class UnsupportedShift : public QcfError {
 public:
  using QcfError::QcfError;
};

struct ParamPoint {
  Rational a{0};
  Rational b{0};
  Rational lambda{0};

  friend bool operator==(const ParamPoint&, const ParamPoint&) = default;
};

inline std::string to_string(const ParamPoint& p) {
  return "a=" + p.a.get_str() + ",b=" + p.b.get_str() + ",l=" + p.lambda.get_str();
}

/// Parameters as monomials c q^w. A weight w > 0 grades the parameter by
/// q, which turns identities whose terms carry bare powers x^k into
/// q-adically convergent ones without losing information: the q^n
/// coefficient collects every x^i q^{n-i} contribution, so agreement at
/// random coefficients is equivalent to the two-variable identity.
struct GradedPoint {
  QMonomial a;
  QMonomial b;
  QMonomial lambda;
};

struct Weights {
  int a = 0;
  int b = 0;
  int lambda = 0;
};

inline GradedPoint graded(const ParamPoint& p, Weights w = {}) {
  return {QMonomial(p.a, w.a), QMonomial(p.b, w.b), QMonomial(p.lambda, w.lambda)};
}

/// Ratio term_{k+1} / term_k of a hypergeometric-type sum. The numerator
/// may carry any powers of q; the denominator must be a polynomial with a
/// nonzero constant term.
struct TermRatio {
  LaurentPoly num;
  LaurentPoly den;
};

/// Sums term_0 = 1, term_{k+1} = term_k * ratio(k) to the given order,
/// calling on_term(k, term) for each retained term.
///
/// Ratios must carry a non-negative power of q. The sum stops once a term's
/// valuation exceeds the order and the ratio carries at least q^1.
template <class RatioFn, class OnTerm>
void for_each_term(RatioFn&& ratio, int order, OnTerm&& on_term) {
  const int cap = 4 * order + 64;
  int shift = 0;
  QSeries part = QSeries::one(order);
  for (int k = 0;; ++k) {
    if (shift <= order) on_term(k, shift, part);
    if (k > cap) throw FormallyDivergentSum("term valuations do not grow; grade a parameter by q");
    const TermRatio r = ratio(k);
    if (r.num.is_zero_poly()) return;
    const int v = *r.num.valuation();
    if (v < 0) throw FormallyDivergentSum("term ratio carries a negative power of q");
    shift += v;
    if (shift > order && v >= 1) return;
    if (shift > order) continue;
    const int need = order - shift;
    const QSeries den = r.den.to_series(need);
    if (!den.is_unit()) throw PoleAtParameter("denominator factor vanishes at this parameter point");
    const QSeries num = r.num.normalized().to_series(need);
    part = divide(part.truncated(std::min(need, part.order())) * num, den);
  }
}

template <class RatioFn>
QSeries hypergeometric_sum(RatioFn&& ratio, int order, const std::function<bool(int)>& keep = {}) {
  QSeries total(order);
  for_each_term(ratio, order, [&](int k, int shift, const QSeries& part) {
    if (keep && !keep(k)) return;
    for (int i = 0; i + shift <= order && i <= part.order(); ++i) total[i + shift] += part[i];
  });
  return total;
}

enum class Family { R, g, g1, g2, G, G1A, G1B, G2, C, Eisenstein };

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::R: return "R";
    case Family::g: return "g";
    case Family::g1: return "g1";
    case Family::g2: return "g2";
    case Family::G: return "G";
    case Family::G1A: return "G1A";
    case Family::G1B: return "G1B";
    case Family::G2: return "G2";
    case Family::C: return "C";
    case Family::Eisenstein: return "Eisenstein";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view name) {
  for (Family f : {Family::R, Family::g, Family::g1, Family::g2, Family::G, Family::G1A, Family::G1B,
                   Family::G2, Family::C, Family::Eisenstein})
    if (family_name(f) == name) return f;
  return std::nullopt;
}

namespace detail {

inline LaurentPoly one_minus_q(int p) { return LaurentPoly(1) - qm(1, p); }
inline LaurentPoly one_plus(const QMonomial& x, int p) { return LaurentPoly(1) + LaurentPoly(x) * qm(1, p); }

// Term ratio for each family at shift s. Definitions, with (x)_k = (x;q)_k:
//   R(s)   = sum q^{k^2+sk} a^k / (q)_k
//   g(s)   = sum q^{k^2+sk} l^k / ((q)_k (-bq)_k)            = g(b, l q^s)
//   g1(s)  = sum q^{k^2+sk} l^k / ((q)_k (-bq^s)_k)
//   g2(s)  = sum (-l q^s/b)_k b^k q^{(k^2+k)/2} / (q)_k
//   G(s)   = sum (-l/a)_k a^k q^{sk+(k^2+k)/2} / ((q)_k (-bq)_k) = G(aq^s, b, lq^s)
//   G1A(s) = sum (-l q^s/a)_k (-l q^s/b)_k (abq/l)^k / (q)_k
//   G1B(s) = sum (-l q^s/a)_k (-l q^{s+1}/b)_k (abq/l)^k / (q)_k
//   G2(s)  = sum (ab q^s/l)_k (-l/a)^k / ((q)_k (-a q^{s+1})_k)
//   C(s)   = sum (b q^s/a)_{2k} a^{2k} / (q^2;q)_{2k} prod_{i=1}^{s-1} (1-q^{2i+1})/(1-q^{2k+2i+1})
//   Eisenstein(s) = sum (-a)^k q^{k(k+1)/2 + sk}
// Pochhammer factors with a parameter in the base are multiplied through by
// that parameter, e.g. (-l/a)_k a^k = prod_{j<k} (a + l q^j), so a = 0 or
// b = 0 needs no special casing.
inline TermRatio family_ratio(Family f, int s, const GradedPoint& p, int k) {
  const LaurentPoly A(p.a), B(p.b), L(p.lambda);
  switch (f) {
    case Family::R:
      return {A * qm(1, 2 * k + 1 + s), one_minus_q(k + 1)};
    case Family::g:
      return {L * qm(1, 2 * k + 1 + s), one_minus_q(k + 1) * one_plus(p.b, k + 1)};
    case Family::g1:
      return {L * qm(1, 2 * k + 1 + s), one_minus_q(k + 1) * one_plus(p.b, s + k)};
    case Family::g2:
      return {(B + L * qm(1, s + k)) * qm(1, k + 1), one_minus_q(k + 1)};
    case Family::G:
      return {(A + L * qm(1, k)) * qm(1, s + k + 1), one_minus_q(k + 1) * one_plus(p.b, k + 1)};
    case Family::G1A:
    case Family::G1B: {
      const int extra = f == Family::G1B ? 1 : 0;
      const LaurentPoly inv_l(p.lambda.inverse());
      return {(A + L * qm(1, s + k)) * (B + L * qm(1, s + extra + k)) * inv_l * qm(1, 1), one_minus_q(k + 1)};
    }
    case Family::G2: {
      const LaurentPoly ratio_la(p.lambda * p.a.inverse());
      return {B * qm(1, s + k) - ratio_la, one_minus_q(k + 1) * one_plus(p.a, s + 1 + k)};
    }
    case Family::C: {
      LaurentPoly num = (A - B * qm(1, s + 2 * k)) * (A - B * qm(1, s + 2 * k + 1));
      LaurentPoly den = one_minus_q(2 * k + 2) * one_minus_q(2 * k + 3);
      if (s >= 2) {
        num = num * one_minus_q(2 * k + 3);
        den = den * one_minus_q(2 * k + 2 * s + 1);
      }
      return {num, den};
    }
    case Family::Eisenstein:
      return {-A * qm(1, k + 1 + s), LaurentPoly(1)};
  }
  throw QcfError("unknown family");
}

}  // namespace detail

/// Truncated sum of a family's defining series at a graded parameter point.
inline QSeries build_family(Family f, int s, const GradedPoint& p, int order) {
  if (s < 0) throw UnsupportedShift("negative shift");
  if (f == Family::C && s < 1) throw UnsupportedShift("C(s) is defined for s >= 1");
  if ((f == Family::G1A || f == Family::G1B || f == Family::G2) && p.lambda.is_zero_monomial())
    throw PoleAtParameter("family needs lambda != 0");
  if (f == Family::G2 && p.a.is_zero_monomial()) throw PoleAtParameter("G2 needs a != 0");
  return hypergeometric_sum([&](int k) { return detail::family_ratio(f, s, p, k); }, order);
}

inline QSeries build_family(Family f, int s, const ParamPoint& p, int order) {
  return build_family(f, s, graded(p), order);
}

// Individual terms term_0..term_kmax (zero series past the cutoff).
inline std::vector<QSeries> family_terms(Family f, int s, const GradedPoint& p, int order, int kmax) {
  std::vector<QSeries> out(static_cast<std::size_t>(kmax) + 1, QSeries(order));
  if (f == Family::C && s < 1) throw UnsupportedShift("C(s) is defined for s >= 1");
  for_each_term([&](int k) { return detail::family_ratio(f, s, p, k); }, order,
                [&](int k, int shift, const QSeries& part) {
                  if (k > kmax) return;
                  auto& t = out[static_cast<std::size_t>(k)];
                  for (int i = 0; i + shift <= order && i <= part.order(); ++i) t[i + shift] = part[i];
                });
  return out;
}

/// lim_{a->0} (-l/a; q)_k a^k = l^k q^{k(k-1)/2}.
inline QSeries limit_pochhammer_scaled(const Rational& lambda, int k, int order) {
  Rational pw(1);
  for (int i = 0; i < k; ++i) pw *= lambda;
  return QSeries::monomial(pw, k * (k - 1) / 2, order);
}

/// Deterministic parameter stream: numerators in [-9,9]\{0}, denominators in
/// [2,16], consecutive points distinct. Uses the raw mt19937_64 output so the
/// stream is identical across standard libraries.
class ParamStream {
 public:
  explicit ParamStream(std::uint64_t seed) : rng_(seed) {}

  ParamPoint next() {
    for (;;) {
      ParamPoint p{draw(), draw(), draw()};
      if (std::find(seen_.begin(), seen_.end(), p) != seen_.end()) continue;
      seen_.push_back(p);
      return p;
    }
  }

 private:
  Rational draw() {
    long num = static_cast<long>(rng_() % 18) - 9;
    if (num >= 0) ++num;  // skip zero
    const long den = static_cast<long>(rng_() % 15) + 2;
    return make_rational(num, den);
  }

  std::mt19937_64 rng_;
  std::vector<ParamPoint> seen_;
};

inline std::vector<ParamPoint> sample_params(std::uint64_t seed, int count) {
  if (count < 1) throw QcfError("sample_params needs count >= 1");
  ParamStream stream(seed);
  std::vector<ParamPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(stream.next());
  return out;
}

}  // namespace qcf
