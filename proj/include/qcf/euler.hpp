#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcf/cfrac.hpp"

namespace qcf {

class NonUnitInput : public QcfError {
 public:
  using QcfError::QcfError;
};

/// One step of N/D = 1 + (N - D)/D with N - D = factor * E, E(0) = 1.
struct EulerStepResult {
  QMonomial factor;
  QSeries next_denominator;
  bool terminated = false;
};

inline EulerStepResult euler_step(const QSeries& num, const QSeries& den) {
  if (num[0] != 1 || den[0] != 1) throw NonUnitInput("euler_step needs constant terms equal to 1");
  const QSeries delta = num - den;
  const auto m = delta.valuation();
  if (!m) return {QMonomial(), QSeries::zero(delta.order()), true};
  const Rational c = delta[*m];
  QSeries e = shift_down(delta, *m);
  e *= Rational(1 / c);
  return {QMonomial(c, *m), e, false};
}

enum class StopReason { terminated, max_depth, precision_exhausted };

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::terminated: return "terminated";
    case StopReason::max_depth: return "max_depth";
    case StopReason::precision_exhausted: return "precision_exhausted";
  }
  return "?";
}

struct ExpansionTrace {
  std::vector<EulerStepResult> steps;
  int initial_order = 0;
  int residual_order = 0;
  StopReason stop = StopReason::max_depth;

  // Power through which the produced fraction is known to match N/D. A
  // terminated expansion is exact; otherwise the unknown next factor carries
  // at least one more power of q than the ones emitted.
  int certified_order() const {
    if (stop == StopReason::terminated) return initial_order;
    int used = 0;
    for (const auto& s : steps) used += s.factor.power;
    return std::min(initial_order, used);
  }

  // 1 + f_1/(1 + f_2/(1 + ...)), one level per emitted factor.
  CFrac produced() const {
    std::vector<QMonomial> f;
    for (const auto& s : steps) f.push_back(s.factor);
    return CFrac::polynomial(
        LaurentPoly(1), [f](int n) { return PolyElement{LaurentPoly(f.at(static_cast<std::size_t>(n - 1))), 1}; },
        false, static_cast<int>(f.size()));
  }
};

/// Repeats the Euler step on (D, E), (E, E'), ... A factor q^m costs m
/// orders of usable precision; no factor is emitted that would leave fewer
/// than `floor` orders.
inline ExpansionTrace euler_expand(const QSeries& num, const QSeries& den, int max_depth, int floor = 2) {
  if (max_depth < 1) throw QcfError("max_depth must be at least 1");
  ExpansionTrace t;
  QSeries n = num, d = den;
  const int order = std::min(num.order(), den.order());
  t.initial_order = t.residual_order = order;
  for (int depth = 0; depth < max_depth; ++depth) {
    EulerStepResult s = euler_step(n, d);
    if (s.terminated) {
      t.stop = StopReason::terminated;
      return t;
    }
    if (t.residual_order - s.factor.power < floor) {
      t.stop = StopReason::precision_exhausted;
      return t;
    }
    t.residual_order -= s.factor.power;
    n = d.truncated(s.next_denominator.order());
    d = s.next_denominator;
    t.steps.push_back(std::move(s));
  }
  t.stop = StopReason::max_depth;
  return t;
}

inline std::string render_trace(const ExpansionTrace& t) {
  std::ostringstream os;
  int remaining = t.initial_order;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    remaining -= t.steps[i].factor.power;
    os << i + 1 << ": a_" << i + 1 << " = " << to_string(t.steps[i].factor) << ", residual_order = " << remaining
       << "\n";
  }
  if (t.stop == StopReason::terminated && t.steps.empty()) os << "terminated: ratio is 1\n";
  os << "stop: " << to_string(t.stop) << ", residual_order = " << t.residual_order << "\n";
  return os.str();
}

inline nlohmann::json trace_json(const ExpansionTrace& t) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : t.steps) steps.push_back({{"coef", s.factor.coef.get_str()}, {"power", s.factor.power}});
  return {{"steps", steps},
          {"residual_order", t.residual_order},
          {"terminated", t.stop == StopReason::terminated},
          {"stop", to_string(t.stop)}};
}

struct ThreeTermResult {
  bool pass = false;
  std::optional<int> first_mismatch;
};

/// s0 = c1 s1 + c2 s2 through q^order.
inline ThreeTermResult verify_three_term(const QSeries& s0, const QSeries& s1, const QSeries& s2, const QSeries& c1,
                                         const QSeries& c2, int order) {
  auto at = [order](const QSeries& x) {
    if (x.order() < order) throw QcfError("series order below the requested check order");
    return x.truncated(order);
  };
  const QSeries rhs = at(c1) * at(s1) + at(c2) * at(s2);
  const auto mm = first_mismatch(at(s0), rhs);
  return {!mm, mm};
}

/// Partial quotients [b0; b1, ...] of p/q by Euclid's algorithm.
inline std::vector<Integer> euclid_cf(Integer p, Integer q) {
  if (p <= 0 || q <= 0) throw QcfError("euclid_cf needs positive p and q");
  std::vector<Integer> out;
  while (q != 0) {
    Integer a, r;
    mpz_fdiv_qr(a.get_mpz_t(), r.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    out.push_back(a);
    p = q;
    q = r;
  }
  return out;
}

inline Rational euclid_value(const std::vector<Integer>& quotients) {
  if (quotients.empty()) throw QcfError("empty quotient list");
  Rational v(quotients.back());
  for (auto it = quotients.rbegin() + 1; it != quotients.rend(); ++it) v = Rational(*it) + 1 / v;
  return v;
}

inline std::string render_quotients(const std::vector<Integer>& quotients) {
  std::string s = "[" + quotients.front().get_str();
  for (std::size_t i = 1; i < quotients.size(); ++i) s += (i == 1 ? "; " : ", ") + quotients[i].get_str();
  return s + "]";
}

}  // namespace qcf
