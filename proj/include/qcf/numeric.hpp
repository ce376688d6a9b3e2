#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "qcf/cfrac.hpp"

namespace qcf {

class HorizonExceeded : public QcfError {
 public:
  using QcfError::QcfError;
};

class NumericBlowup : public QcfError {
 public:
  using QcfError::QcfError;
};

/// Floating-point fraction b0 + K(a_n/b_n) (reciprocal when inverted).
struct NumericCF {
  double b0 = 0;
  std::function<std::pair<double, double>(int)> element;
  bool inverted = false;
};

/// Evaluates each polynomial element exactly at the rational q, then rounds.
inline NumericCF numeric_at(const CFrac& cf, const Rational& q) {
  if (abs(q) >= 1) throw QcfError("numeric evaluation needs |q| < 1");
  NumericCF n;
  n.b0 = cf.poly_b0().evaluate(q).get_d();
  n.inverted = cf.inverted();
  n.element = [cf, q](int k) {
    const PolyElement e = cf.poly_element(k);
    return std::pair{e.a.evaluate(q).get_d(), e.b.evaluate(q).get_d()};
  };
  return n;
}

/// Smallest N with |a_n'| <= bound for every N <= n <= horizon, where a_n'
/// are the elements of the equivalent fraction with unit partial
/// denominators (a_n' = a_n / (b_{n-1} b_n), b_0 taken as 1). The envelope
/// |a_n'| of every fraction handled here decreases once below the bound, so
/// the scan up to the horizon settles the index; if the last element in the
/// window still exceeds the bound no index is reported.
inline int worpitzky_index(const NumericCF& ncf, double bound = 0.25, int horizon = 400) {
  if (horizon < 1) throw QcfError("horizon must be positive");
  int last_bad = 0;
  double prev_b = 1;
  for (int n = 1; n <= horizon; ++n) {
    const auto [a, b] = ncf.element(n);
    const double scaled = std::abs(a / (prev_b * b));
    if (!(scaled <= bound)) last_bad = n;
    prev_b = b;
  }
  if (last_bad == horizon) throw HorizonExceeded("no Worpitzky index within the horizon");
  return last_bad + 1;
}

/// Backward evaluation of S_n(0).
inline double numeric_value(const NumericCF& ncf, int n) {
  constexpr double tiny = 1e-300;
  double t = 0;
  for (int k = n; k >= 1; --k) {
    const auto [a, b] = ncf.element(k);
    const double d = b + t;
    if (std::abs(d) < tiny) throw NumericBlowup("denominator vanished at level " + std::to_string(k));
    t = a / d;
  }
  double v = ncf.b0 + t;
  if (ncf.inverted) {
    if (std::abs(v) < tiny) throw NumericBlowup("denominator vanished at level 0");
    v = 1 / v;
  }
  return v;
}

}  // namespace qcf
