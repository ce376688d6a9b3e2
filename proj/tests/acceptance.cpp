// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "qcf/catalog.hpp"
#include "qcf/cli.hpp"
#include "qcf/euler.hpp"
#include "qcf/numeric.hpp"

using namespace qcf;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

QSeries R(int s, const Rational& a, int N) { return build_family(Family::R, s, ParamPoint{a, 0, 0}, N); }

QSeries R_ratio(const Rational& a, int N) { return divide(R(1, a, N), R(0, a, N)); }

std::string fail_text(const IdentityReport& r) {
  return r.id + " at " + params_text(r.params) + ": " + to_string(r.status) +
         (r.first_mismatch_power ? " at q^" + std::to_string(*r.first_mismatch_power) : "") + " " + r.comparison +
         r.reason;
}

Outcome ac1_full_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunReport rr = verify_all(0, 3, 40, 8);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome o;
  const std::size_t entries = register_all().size();
  std::ostringstream d;
  d << entries << " entries, pass=" << rr.summary.pass << " fail=" << rr.summary.fail << " skip=" << rr.summary.skip
    << ", " << std::fixed << std::setprecision(2) << secs << " s";
  o.detail = d.str();
  o.ok = entries >= 27 && rr.summary.fail == 0 && secs < 60;
  for (const auto& r : rr.reports)
    if (r.status == Status::fail) o.detail += "; " + fail_text(r);
  return o;
}

Outcome ac2_euler() {
  Outcome o;
  for (const Rational& a : {Rational(1), make_rational(1, 3)}) {
    const ExpansionTrace t = euler_expand(R(0, a, 80), R(1, a, 80), 10);
    bool ok = t.steps.size() == 10;
    for (int k = 1; ok && k <= 10; ++k) ok = t.steps[static_cast<std::size_t>(k - 1)].factor == QMonomial(a, k);
    o.ok = o.ok && ok;
    o.detail += "a=" + a.get_str() + (ok ? ": a*q^1..a*q^10 " : ": mismatch ");
  }
  return o;
}

Outcome ac3_recurrences() {
  Outcome o;
  int checked = 0;
  for (const char* id : {"REC_RR", "REC_G1", "REC_G2", "REC_GG2", "REC_G1AB", "REC_C"}) {
    for (const ParamPoint& p : sample_params(0, 3)) {
      const IdentityReport r = verify(id, p, 40, 8);
      ++checked;
      if (r.status != Status::pass) {
        o.ok = false;
        o.detail += fail_text(r) + "; ";
      }
    }
  }
  if (o.ok) o.detail = std::to_string(checked) + " recurrence checks, s = 0..6 (1..6 for C)";
  return o;
}

Outcome ac4_contact() {
  Outcome o;
  const int N = 100;
  const auto apps = approximants(catalog_detail::rr_cf(1), 12, N);
  const QSeries target = R_ratio(1, N);
  int prev = 0;
  for (int n = 1; n <= 12; ++n) {
    const auto mm = first_mismatch(apps[static_cast<std::size_t>(n - 1)], target);
    const int k = mm ? *mm : N + 1;
    if (!(k >= n + 1 && k > prev)) o.ok = false;
    o.detail += std::to_string(k) + (n < 12 ? "," : "");
    prev = k;
  }
  o.detail = "first mismatch n=1..12: " + o.detail;
  return o;
}

Outcome ac5_modified() {
  Outcome o;
  const int N = 40;
  for (const Rational& a : {Rational(1), make_rational(1, 2)}) {
    const CFrac cf = to_standard_form(catalog_detail::rr_cf(a));
    const QSeries target = R_ratio(a, N);
    for (int n = 1; n <= 10; ++n) {
      const QSeries w = monomial_mul(QMonomial(a, n), divide(R(n + 1, a, N), R(n, a, N)));
      if (first_mismatch(modified_approximant(cf, n, w, N), target)) {
        o.ok = false;
        o.detail += "a=" + a.get_str() + " n=" + std::to_string(n) + " differs; ";
      }
    }
  }
  if (o.ok) o.detail = "S_n(w_n) = R(1)/R(0) exactly, n = 1..10, a in {1, 1/2}, N=40";
  return o;
}

Outcome ac6_equivalence() {
  Outcome o;
  const int N = 30;
  for (const ParamPoint& p : sample_params(0, 3)) {
    const CFrac cf = catalog_detail::g_cfrac2(p.b, p.lambda);
    const CFrac eq = equivalence_unit_denominators(cf, 15);
    const bool same = approximants(cf, 15, N) == approximants(eq, 15, N);
    const QSeries den = ((LaurentPoly(1) + qm(p.b, 1)) * (LaurentPoly(1) + qm(p.b, 2))).to_series(N);
    const bool a2 = eq.element(2, N).a == divide(QSeries::monomial(p.lambda, 2, N), den);
    if (!same || !a2) {
      o.ok = false;
      o.detail += to_string(p) + (same ? "" : " approximants differ") + (a2 ? "" : " a_2' differs") + "; ";
    }
  }
  if (o.ok) o.detail = "approximants n <= 15 identical and a_2' matches at 3 points";
  return o;
}

Outcome ac7_products() {
  Outcome o;
  const IdentityReport poch = verify("POCH_IDS", sample_params(0, 1)[0], 60, 8);
  // depth 12 puts the contact bound of the product-ratio fraction past q^60
  const IdentityReport prod = verify("PROD_RATIO", ParamPoint{}, 60, 12);
  const Comparison c = cf_comparison(*lookup("PROD_RATIO"), ParamPoint{}, 60, 12);
  o.ok = poch.status == Status::pass && prod.status == Status::pass && c.through == 60;
  o.detail = "POCH_IDS " + to_string(poch.status) + ", PROD_RATIO " + to_string(prod.status) + " through q^" +
             std::to_string(c.through);
  return o;
}

Outcome ac8_numeric() {
  Outcome o;
  const Rational q = make_rational(1, 2);
  const NumericCF rr = numeric_at(catalog_detail::rr_cf(1), q);
  const int index = worpitzky_index(rr);
  // oracle: 40 exact terms of R(1) and R(0) at q = 1/2
  auto sum = [&](int s) {
    Rational total(0), term(1), qpow(1);
    for (int k = 0; k < 40; ++k) {
      total += term;
      Rational num(1);
      for (int i = 0; i < 2 * k + 1 + s; ++i) num *= q;
      qpow *= q;
      term *= num / (1 - qpow);
    }
    return total;
  };
  const Rational ratio = sum(1) / sum(0);
  const double err = std::abs(numeric_value(rr, 60) - ratio.get_d());
  double worst = 0;
  for (int n = 50; n < 60; ++n) worst = std::max(worst, std::abs(numeric_value(rr, n + 1) - numeric_value(rr, n)));
  o.ok = index == 2 && err < 1e-10 && worst < 1e-12;
  std::ostringstream d;
  d << "worpitzky_index=" << index << ", |S_60 - oracle|=" << err << ", max |S_{n+1}-S_n| (n>=50)=" << worst;
  o.detail = d.str();
  return o;
}

Outcome ac9_reductions() {
  Outcome o;
  for (const auto& [a, b] : {std::pair{"G_CFRAC_g2", "RR_CF"}, std::pair{"RAMANUJAN_G1", "G_CFRAC_g1"},
                             std::pair{"HIRSCHHORN", "G_CFRAC_g3"}}) {
    for (const ParamPoint& p : sample_params(0, 3)) {
      const IdentityReport r = check_reduction(a, b, p, 40, 8);
      if (r.status != Status::pass) {
        o.ok = false;
        o.detail += fail_text(r) + "; ";
      }
    }
  }
  if (o.ok) o.detail = "G_CFRAC_g2->RR_CF, RAMANUJAN_G1->G_CFRAC_g1, HIRSCHHORN->G_CFRAC_g3 at 3 points, N=40";
  return o;
}

Outcome ac10_negative_control() {
  std::ostringstream out, err;
  const int code = run_cli({"verify", "RR_CF", "--params", "a=1", "--depth", "10", "--perturb", "2"}, out, err);
  const std::string text = out.str();
  const auto pos = text.find("first mismatch at q^");
  Outcome o;
  o.ok = code == 1 && pos != std::string::npos;
  o.detail = "exit " + std::to_string(code);
  if (pos != std::string::npos) o.detail += ", " + text.substr(pos, text.find_first_of(" \n", pos + 20) - pos);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 full identity suite", ac1_full_suite},
      {"AC2 Euler expansion of R(0)/R(1)", ac2_euler},
      {"AC3 three-term recurrences", ac3_recurrences},
      {"AC4 order of contact", ac4_contact},
      {"AC5 modified approximants", ac5_modified},
      {"AC6 equivalence transform", ac6_equivalence},
      {"AC7 product identities", ac7_products},
      {"AC8 numeric convergence", ac8_numeric},
      {"AC9 reduction links", ac9_reductions},
      {"AC10 negative control", ac10_negative_control},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.ok) ++failed;
    std::cout << (o.ok ? "PASS  " : "FAIL  ") << name << "  (" << o.detail << ")\n";
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed\n" : "all criteria passed\n");
  return failed ? 1 : 0;
}
